use std::path::Path;

use serde::Serialize;

use ptcubic::analysis::{energy_curve, ratio_table, CurvePoint};
use ptcubic::io::{
    curve_csv, fmt_f64, grid_binary, grid_csv, grid_sidecar, ratio_csv, spectrum_csv, to_json_pretty, Envelope,
    SeriesRecord, SpectrumRecord,
};
use ptcubic::precise::{zeta_exact, zeta_exact_digits};
use ptcubic::rational::{to_decimal_string, to_fraction_string};
use ptcubic::series::default_series_order;
use ptcubic::spectral::{
    low_levels_with, massless_cubic_levels, select_massless_scale, zeta_partial_sums, SpectralProblem,
    CONVERGENCE_TOLERANCE, DEFAULT_DIMENSION_CAP, MASSLESS_SCALE_GRID,
};
use ptcubic::wkb::{
    flux_identity_value, mpep_directions, potential_grid, riccati_solve, MpepSet, WkbConstants,
    DEFAULT_RICCATI_EPSILON, DEFAULT_RICCATI_TOLERANCE,
};
use ptcubic::{EnergySeries, ModelId};

use crate::{Command, Common, Failure, Format, Report};

/// Decimal digits printed next to each exact series coefficient.
const SERIES_DECIMAL_DIGITS: usize = 50;
const IDENTITY_TOLERANCE: f64 = 1e-10;
const ODE_TOLERANCE: f64 = 1e-6;

type Outcome = Result<Report, Failure>;

fn bad(msg: impl Into<String>) -> Failure {
    Failure::BadArgs(msg.into())
}

fn computation(e: ptcubic::Error) -> Failure {
    Failure::Computation(e.to_string())
}

fn emit<D: Serialize>(cmd: &Command, data: &D) -> Result<String, Failure> {
    to_json_pretty(&Envelope::new(cmd, data)).map_err(computation)
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Series { common, model, orders } => series(cmd, common, *model, *orders),
        Command::Pade { common, model, l, m, g_min, g_max, steps } => {
            pade(cmd, common, *model, (*l, *m), &linear_grid(*g_min, *g_max, *steps)?)
        }
        Command::Spectrum { common, model, g, g_min, g_max, steps, cutoff, levels } => {
            let grid = if g.is_empty() { linear_grid(*g_min, *g_max, *steps)? } else { g.clone() };
            if let Some(bad_g) = grid.iter().find(|x| !x.is_finite()) {
                return Err(bad(format!("coupling {bad_g} is not finite")));
            }
            spectrum(cmd, common, *model, &grid, *cutoff, *levels)
        }
        Command::Largeorder { common, model, orders, richardson_k } => {
            largeorder(cmd, common, *model, *orders, *richardson_k)
        }
        Command::Wkb { common, model, orders } => wkb(cmd, common, *model, *orders),
        Command::Grid { common, model, g, extent, resolution, binary } => {
            grid(cmd, common, *model, *g, *extent, *resolution, binary.as_deref())
        }
        Command::Zeta { common, cutoff, omega, levels } => zeta(cmd, common, *cutoff, *omega, *levels),
    }
}

fn linear_grid(g_min: f64, g_max: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if !(g_min.is_finite() && g_max.is_finite()) || g_max < g_min || steps == 0 {
        return Err(bad(format!("need finite g-min ≤ g-max and steps ≥ 1, got [{g_min}, {g_max}] with {steps}")));
    }
    Ok((0..=steps).map(|i| g_min + (g_max - g_min) * i as f64 / steps as f64).collect())
}

fn series(cmd: &Command, common: &Common, model: ModelId, orders: Option<usize>) -> Outcome {
    let s = EnergySeries::compute(model, orders.unwrap_or_else(|| default_series_order(model)))?;
    let text = match common.format {
        Format::Json => emit(cmd, &SeriesRecord::from_series(&s, Some(SERIES_DECIMAL_DIGITS)))?,
        Format::Csv => {
            let mut out = String::from("n,c_n,decimal\n");
            for (n, c) in s.coefficients.iter().enumerate() {
                out += &format!("{n},{},{}\n", to_fraction_string(c), to_decimal_string(c, SERIES_DECIMAL_DIGITS));
            }
            out
        }
    };
    let anomalies = s.alternation_violations().iter().map(|n| format!("c_{n} breaks sign alternation")).collect();
    Ok(Report { text, anomalies })
}

#[derive(Serialize)]
struct CurveRecord {
    g: f64,
    #[serde(rename = "E")]
    energy: Option<String>,
    pole: bool,
}

fn pade(cmd: &Command, common: &Common, model: ModelId, (l, m): (usize, usize), grid: &[f64]) -> Outcome {
    let points: Vec<CurvePoint> = energy_curve(model, l, m, grid)?;
    let digits = common.digits as usize;
    let text = match common.format {
        Format::Csv => curve_csv(&points, digits).map_err(computation)?,
        Format::Json => {
            let records: Vec<CurveRecord> = points
                .iter()
                .map(|p| CurveRecord {
                    g: p.g,
                    energy: (!p.pole).then(|| p.energy.as_ref().map(|e| to_decimal_string(e, digits))).flatten(),
                    pole: p.pole,
                })
                .collect();
            emit(cmd, &records)?
        }
    };
    let anomalies =
        points.iter().filter(|p| p.pole).map(|p| format!("[{l}/{m}] has a pole on [0, g²] at g = {}", p.g)).collect();
    Ok(Report { text, anomalies })
}

fn default_cutoff(model: ModelId) -> usize {
    match model.dimension() {
        1 => 40,
        2 => 20,
        _ => 12,
    }
}

fn spectrum(
    cmd: &Command,
    common: &Common,
    model: ModelId,
    grid: &[f64],
    cutoff: Option<usize>,
    levels: usize,
) -> Outcome {
    if levels == 0 {
        return Err(bad("--levels must be at least 1"));
    }
    let cutoff = cutoff.unwrap_or_else(|| default_cutoff(model));
    let mut sweep = Vec::with_capacity(grid.len());
    for &g in grid {
        let problem = SpectralProblem::new(model, g, cutoff)?;
        sweep.push((g, low_levels_with(&problem, levels, CONVERGENCE_TOLERANCE, DEFAULT_DIMENSION_CAP)?));
    }
    let mut anomalies = Vec::new();
    for (g, r) in &sweep {
        for (k, _) in r.converged.iter().enumerate().filter(|(_, c)| !**c) {
            anomalies.push(format!("g = {g}: level {k} not converged at cutoff {cutoff}"));
        }
    }
    let text = match common.format {
        Format::Csv => spectrum_csv(&sweep, common.digits as usize).map_err(computation)?,
        Format::Json => emit(cmd, &sweep.iter().map(|(g, r)| SpectrumRecord::new(*g, r)).collect::<Vec<_>>())?,
    };
    Ok(Report { text, anomalies })
}

#[derive(Serialize)]
struct RatioRecord {
    n: usize,
    ratio: f64,
    richardson: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct LargeOrderData {
    #[serde(rename = "K")]
    amplitude: f64,
    #[serde(rename = "B")]
    base: ptcubic::rational::RationalRepr,
    rows: Vec<RatioRecord>,
}

fn largeorder(cmd: &Command, common: &Common, model: ModelId, orders: Option<usize>, k: usize) -> Outcome {
    if k == 0 {
        return Err(bad("--richardson-k must be at least 1"));
    }
    let s = EnergySeries::compute(model, orders.unwrap_or_else(|| default_series_order(model)))?;
    let law = WkbConstants::compute(model, Some(&s))?.law;
    let rows = ratio_table(&s, &law, k)?;
    let text = match common.format {
        Format::Csv => ratio_csv(&rows, k, common.digits as usize).map_err(computation)?,
        Format::Json => emit(
            cmd,
            &LargeOrderData {
                amplitude: law.amplitude,
                base: (&law.base).into(),
                rows: rows
                    .into_iter()
                    .map(|r| RatioRecord { n: r.n, ratio: r.ratio, richardson: r.richardson })
                    .collect(),
            },
        )?,
    };
    let anomalies = s.alternation_violations().iter().map(|n| format!("c_{n} breaks sign alternation")).collect();
    Ok(Report { text, anomalies })
}

#[derive(Serialize)]
struct CheckRecord {
    name: &'static str,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

impl CheckRecord {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        CheckRecord { name, residual, tolerance, pass: residual < tolerance }
    }
}

#[derive(Serialize)]
struct WkbData {
    constants: ptcubic::wkb::ConstantsRecord,
    checks: Vec<CheckRecord>,
    mpep: MpepSet,
}

fn wkb(cmd: &Command, common: &Common, model: ModelId, orders: Option<usize>) -> Outcome {
    let s = match model {
        ModelId::HenonHeiles => {
            Some(EnergySeries::compute(model, orders.unwrap_or_else(|| default_series_order(model)))?)
        }
        _ => None,
    };
    let constants = WkbConstants::compute(model, s.as_ref())?;
    let ode = riccati_solve(DEFAULT_RICCATI_EPSILON, DEFAULT_RICCATI_TOLERANCE)?;
    let checks = vec![
        CheckRecord::new("flux_identity", (constants.flux_prefactor - flux_identity_value()).abs(), IDENTITY_TOLERANCE),
        CheckRecord::new("ode_f0", (ode.f0() - constants.f0).abs(), ODE_TOLERANCE),
        CheckRecord::new("ode_a0", (ode.a0() - constants.a0).abs(), ODE_TOLERANCE),
    ];
    let anomalies = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} residual {:e} exceeds {:e}", c.name, c.residual, c.tolerance))
        .collect();
    let record = constants.record();
    let digits = common.digits as usize;
    let text = match common.format {
        Format::Csv => {
            let mut out = String::from("model,K,B,f0,a0,nu_re,nu_im\n");
            out += &format!(
                "{},{},{}/{},{},{},{},{}\n",
                record.model.as_str(),
                fmt_f64(record.k, digits),
                record.b.num,
                record.b.den,
                fmt_f64(record.f0, digits),
                fmt_f64(record.a0, digits),
                fmt_f64(record.nu_re, digits),
                fmt_f64(record.nu_im, digits)
            );
            out
        }
        Format::Json => emit(cmd, &WkbData { constants: record, checks, mpep: mpep_directions(model)? })?,
    };
    Ok(Report { text, anomalies })
}

#[derive(Serialize)]
struct GridData {
    nx: usize,
    ny: usize,
    extent: f64,
    mpep_angles: Option<Vec<f64>>,
    mpep_directions: Vec<Vec<f64>>,
    values: Vec<f64>,
}

fn grid(
    cmd: &Command,
    common: &Common,
    model: ModelId,
    g: f64,
    extent: f64,
    resolution: usize,
    binary: Option<&Path>,
) -> Outcome {
    let grid = potential_grid(model, g, extent, resolution)?;
    let mpep = mpep_directions(model)?;
    if let Some(prefix) = binary {
        let write = |ext: &str, bytes: &[u8]| {
            let path = prefix.with_extension(ext);
            std::fs::write(&path, bytes).map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))
        };
        write("bin", &grid_binary(&grid))?;
        write("json", to_json_pretty(&grid_sidecar(&grid)).map_err(computation)?.as_bytes())?;
    }
    let text = match common.format {
        Format::Csv => grid_csv(&grid, common.digits as usize).map_err(computation)?,
        Format::Json => emit(
            cmd,
            &GridData {
                nx: grid.nx,
                ny: grid.ny,
                extent: grid.extent,
                mpep_angles: mpep.angles,
                mpep_directions: mpep.directions,
                values: grid.values,
            },
        )?,
    };
    Ok(Report { text, anomalies: Vec::new() })
}

#[derive(Serialize)]
struct ZetaData {
    omega: f64,
    exact: String,
    levels: Vec<ZetaLevel>,
}

#[derive(Serialize)]
struct ZetaLevel {
    k: usize,
    re: f64,
    im: f64,
    partial_sum: f64,
    converged: bool,
}

fn zeta(cmd: &Command, common: &Common, cutoff: usize, omega: Option<f64>, levels: usize) -> Outcome {
    if levels == 0 {
        return Err(bad("--levels must be at least 1"));
    }
    if let Some(o) = omega {
        if !(o > 0.0 && o.is_finite()) {
            return Err(bad(format!("--omega must be positive, got {o}")));
        }
    }
    let omega = match omega {
        Some(o) => o,
        None => select_massless_scale(cutoff, &MASSLESS_SCALE_GRID)?,
    };
    let r = massless_cubic_levels(cutoff, omega, levels)?;
    let sums = zeta_partial_sums(&r.eigenvalues);
    let exact = zeta_exact();
    let rows: Vec<ZetaLevel> = r
        .eigenvalues
        .iter()
        .zip(&sums)
        .zip(&r.converged)
        .enumerate()
        .map(|(i, ((e, &s), &c))| ZetaLevel { k: i + 1, re: e.re, im: e.im, partial_sum: s, converged: c })
        .collect();

    let mut anomalies = Vec::new();
    for row in &rows {
        if !row.converged {
            anomalies.push(format!("level {} not converged at cutoff {cutoff}", row.k - 1));
        }
        if row.partial_sum >= exact {
            anomalies.push(format!("partial sum through {} levels exceeds Z(1)", row.k));
        }
    }
    if sums.windows(2).any(|w| w[1] <= w[0]) {
        anomalies.push("partial sums are not increasing".into());
    }

    let digits = common.digits as usize;
    let exact_text = zeta_exact_digits(digits)?;
    let text = match common.format {
        Format::Csv => {
            let mut out = String::from("k,re,im,partial_sum,bound,converged\n");
            for row in &rows {
                out += &format!(
                    "{},{},{},{},{exact_text},{}\n",
                    row.k,
                    fmt_f64(row.re, digits),
                    fmt_f64(row.im, digits),
                    fmt_f64(row.partial_sum, digits),
                    row.converged
                );
            }
            out
        }
        Format::Json => emit(cmd, &ZetaData { omega, exact: exact_text, levels: rows })?,
    };
    Ok(Report { text, anomalies })
}
