use std::process::{Command, Output};

use ptcubic::io::{read_grid_binary, GridSidecar};

fn ptcubic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptcubic")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ptcubic(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// CSV rows split into fields, header dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn series_xyz_low_orders() {
    let text = stdout(&["series", "--model", "xyz", "--orders", "5"]);
    let r = rows(&text);
    assert_eq!(r.len(), 6);
    assert_eq!(r[0][1], "3");
    assert_eq!(r[1][1], "1/48");
    assert_eq!(r[2][1], "-7/4608");
}

#[test]
fn series_c1d_first_order() {
    let r = rows(&stdout(&["series", "--model", "c1d", "--orders", "1"]));
    assert_eq!(r[1][1], "11/16");
    assert!(r[1][2].starts_with("6.875"), "{}", r[1][2]);
}

#[test]
fn series_hh_order_zero_is_unperturbed() {
    let text = stdout(&["series", "--model", "hh", "--orders", "0"]);
    assert_eq!(text.lines().next(), Some("n,c_n,decimal"));
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][1], "2");
}

#[test]
fn json_envelope_carries_config() {
    let text = stdout(&["series", "--model", "xy2", "--orders", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["tool_version"].is_string());
    assert_eq!(v["config"]["subcommand"], "series");
    assert_eq!(v["config"]["model"], "xy2");
    assert_eq!(v["data"]["coefficients"][1]["num"], "5");
    assert_eq!(v["data"]["coefficients"][1]["den"], "48");
}

#[test]
fn pade_starts_at_unperturbed_energy_and_rises() {
    let r = rows(&stdout(&["pade", "--model", "c1d", "--g-max", "0.1", "--steps", "4"]));
    let e: Vec<f64> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    assert_eq!(e[0], 1.0);
    assert!(e.windows(2).all(|w| w[1] > w[0]), "{e:?}");
}

#[test]
fn pade_agrees_with_spectrum() {
    for model in ["c1d", "xy2"] {
        let pade = rows(&stdout(&["pade", "--model", model, "--g-min", "0.5", "--g-max", "0.5", "--steps", "1"]));
        let diag = rows(&stdout(&["spectrum", "--model", model, "--g", "0.5", "--levels", "1"]));
        let (a, b): (f64, f64) = (pade[0][1].parse().unwrap(), diag[0][2].parse().unwrap());
        assert!((a - b).abs() < 1e-4, "{model}: {a} vs {b}");
        assert_eq!(diag[0][4], "true");
    }
}

#[test]
fn largeorder_table_header() {
    let text = stdout(&["largeorder", "--model", "c1d", "--orders", "8", "--richardson-k", "2"]);
    assert_eq!(text.lines().next(), Some("n,ratio,richardson_k1,richardson_k2"));
    assert_eq!(rows(&text).len(), 8);
}

#[test]
fn wkb_checks_pass() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["wkb", "--model", "xy2", "--format", "json"])).unwrap();
    let checks = v["data"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert_eq!(v["data"]["constants"]["B"]["den"], "18");
}

#[test]
fn grid_binary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("hh");
    let csv_path = dir.path().join("hh.csv");
    let out = ptcubic(&[
        "grid",
        "--model",
        "hh",
        "--resolution",
        "9",
        "--binary",
        prefix.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let sidecar: GridSidecar = serde_json::from_slice(&std::fs::read(prefix.with_extension("json")).unwrap()).unwrap();
    assert_eq!((sidecar.nx, sidecar.ny, sidecar.extent), (9, 9, 3.0));
    let values = read_grid_binary(&std::fs::read(prefix.with_extension("bin")).unwrap(), &sidecar).unwrap();
    let csv_values: Vec<f64> =
        rows(&std::fs::read_to_string(&csv_path).unwrap()).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(values.len(), csv_values.len());
    for (a, b) in values.iter().zip(&csv_values) {
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["spectrum", "--model", "hh", "--g", "0.2,0.4", "--format", "json"],
        vec!["pade", "--model", "xyz", "--steps", "7"],
    ] {
        let mut files = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{}-{run}", args[0]));
            let mut full = args.clone();
            full.extend(["--out", path.to_str().unwrap()]);
            assert!(ptcubic(&full).status.success());
            files.push(std::fs::read_to_string(&path).unwrap());
        }
        assert_eq!(files[0], files[1], "{args:?}");
    }
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        vec!["series", "--model", "quartic"],
        vec!["grid", "--model", "xyz"],
        vec!["spectrum", "--model", "c1d", "--cutoff", "1", "--g", "0.1"],
        vec!["pade", "--model", "c1d", "--g-min", "0.5", "--g-max", "0.1"],
        vec!["series", "--model", "c1d", "--digits", "0"],
    ] {
        assert_eq!(ptcubic(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn anomalies_exit_3_unless_allowed() {
    // a tiny basis cannot converge the upper levels
    let args = ["spectrum", "--model", "xy2", "--g", "0.5", "--cutoff", "4", "--levels", "6"];
    let out = ptcubic(&args);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not converged"));
    assert!(!out.stdout.is_empty(), "table still written");

    let mut allowed = args.to_vec();
    allowed.push("--allow-warn");
    assert_eq!(ptcubic(&allowed).status.code(), Some(0));
}

#[test]
fn zeta_partial_sums_stay_below_closed_form() {
    let r = rows(&stdout(&["zeta", "--levels", "5", "--cutoff", "80", "--omega", "2"]));
    assert_eq!(r.len(), 5);
    let bound: f64 = r[0][4].parse().unwrap();
    assert!((bound - 2.835_094_933_971_79).abs() < 1e-12);
    let sums: Vec<f64> = r.iter().map(|row| row[3].parse().unwrap()).collect();
    assert!(sums.windows(2).all(|w| w[1] > w[0]) && sums[4] < bound);
}
