mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ptcubic::ModelId;

/// Exit status for a computation that finished but flagged an anomaly.
const EXIT_ANOMALY: u8 = 3;
/// Exit status for rejected arguments (clap uses the same code).
const EXIT_BAD_ARGS: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ptcubic", version, about = "PT-symmetric cubic oscillators: series, summation, spectra and WKB")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Output file; standard output when absent. Not echoed into the JSON config.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Significant digits: exact values use all of them, f64 columns at most 17.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..=200))]
    digits: u32,
    /// Report anomalies on stderr but exit 0.
    #[arg(long)]
    allow_warn: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
enum Command {
    /// Exact energy-series coefficients cₙ (in powers of g²).
    Series {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// One of c1d, xy2, xyz, hh.
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        /// Highest order n; defaults to the model's full depth.
        #[arg(long)]
        orders: Option<usize>,
    },
    /// Padé-summed ground-state energy on a g grid.
    Pade {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// One of c1d, xy2, xyz, hh.
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        #[arg(short = 'L', long = "l", default_value_t = 9)]
        l: usize,
        #[arg(short = 'M', long = "m", default_value_t = 9)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        g_min: f64,
        #[arg(long, default_value_t = 0.5)]
        g_max: f64,
        /// Number of intervals; the grid has steps + 1 points.
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Low-lying levels of the truncated Hamiltonian.
    Spectrum {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// One of c1d, xy2, xyz, hh.
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        /// Coupling values, comma separated; overrides the range flags.
        #[arg(long, value_delimiter = ',')]
        g: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        g_min: f64,
        #[arg(long, default_value_t = 0.5)]
        g_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Basis states per dimension; defaults to 40, 20 or 12 by dimension.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Ratio of cₙ to the large-order law with Richardson columns.
    Largeorder {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// One of c1d, xy2, xyz, hh.
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        #[arg(long)]
        orders: Option<usize>,
        #[arg(long, default_value_t = 3)]
        richardson_k: usize,
    },
    /// Transverse WKB constants, escape channels and consistency checks.
    Wkb {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// One of c1d, xy2, xyz, hh.
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        /// Series depth for the fitted Hénon–Heiles amplitude.
        #[arg(long)]
        orders: Option<usize>,
    },
    /// Escape potential on a square grid (planar models).
    Grid {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// One of c1d, xy2, xyz, hh.
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        #[arg(long, default_value_t = 0.3)]
        g: f64,
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Also write PREFIX.bin (row-major little-endian f64) and PREFIX.json.
        #[arg(long)]
        binary: Option<PathBuf>,
    },
    /// Closed-form Z(1) for p² + ix³ against diagonalized partial sums.
    Zeta {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, default_value_t = ptcubic::spectral::DEFAULT_MASSLESS_CUTOFF)]
        cutoff: usize,
        /// Basis scale; chosen from a fixed grid when absent.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Series { common, .. }
            | Command::Pade { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Largeorder { common, .. }
            | Command::Wkb { common, .. }
            | Command::Grid { common, .. }
            | Command::Zeta { common, .. } => common,
        }
    }
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse::<ModelId>().map_err(|e| e.to_string())
}

/// What a command produced: the main document plus any anomalies it noticed.
pub struct Report {
    pub text: String,
    pub anomalies: Vec<String>,
}

pub enum Failure {
    BadArgs(String),
    Computation(String),
}

impl From<ptcubic::Error> for Failure {
    fn from(e: ptcubic::Error) -> Self {
        match e {
            ptcubic::Error::InvalidArgument(_)
            | ptcubic::Error::UnknownModel(_)
            | ptcubic::Error::DimensionOverflow { .. } => Failure::BadArgs(e.to_string()),
            _ => Failure::Computation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common().clone();
    let report = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(Failure::BadArgs(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_BAD_ARGS);
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_ANOMALY);
        }
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, &report.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", report.text);
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_ANOMALY);
    }
    for a in &report.anomalies {
        eprintln!("warning: {a}");
    }
    if report.anomalies.is_empty() || common.allow_warn {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ANOMALY)
    }
}
