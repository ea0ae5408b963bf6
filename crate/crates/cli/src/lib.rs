//! Front end of the `tsum` binary: argument types, commands and output.

pub mod commands;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{figure1, Output};
pub use table::{Cell, Table};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Numerical(_) | CliError::Io(_) => exit::NUMERICAL,
        }
    }
}

impl From<tsum::Error> for CliError {
    fn from(e: tsum::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tsum", version, about = "Densities, coefficients and samples for sums of Student t vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; validation reports default to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mixing weights alpha_k or c_n with cumulative mass and tail bound.
    Coeffs(CoeffsArgs),
    /// Series density on a radial or 1-d grid.
    Density(DensityArgs),
    /// Exact draws of Z, Y or the mixing indices K, N.
    Sample(SampleArgs),
    /// Compare the series with an independent oracle.
    Validate(ValidateArgs),
    /// f_Z, its first four terms and their partial sum for d = 1.
    Figure1(Figure1Args),
}

/// Law parameters. Degrees of freedom may be given as `--df` (= 2ν) or as
/// the half-degrees `--nu`; likewise `--df2` or `--mu`.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, conflicts_with = "df")]
    pub nu: Option<f64>,
    #[arg(long)]
    pub df: Option<f64>,
    #[arg(long, conflicts_with = "df2")]
    pub mu: Option<f64>,
    #[arg(long)]
    pub df2: Option<f64>,
    /// Gaussian scale; `σ = 1/(γ√2)` when only `--gamma` is given.
    #[arg(long, conflicts_with = "gamma")]
    pub sigma: Option<f64>,
    /// Student-to-Gaussian scale ratio `γ`; 0 gives a pure Gaussian.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Coefficient of the Gaussian summand.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a1: f64,
    /// Coefficient of the Student summand.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Alpha,
    C,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Omitted tail mass allowed.
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    /// Emit exactly this many coefficients instead of the shortest prefix.
    #[arg(long)]
    pub terms: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityLaw {
    Fz,
    Fy,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub law: DensityLaw,
    #[command(flatten)]
    pub params: ParamArgs,
    /// `min:max:step`; negative entries are read as the 1-d coordinate.
    #[arg(long, default_value = "0:10:0.1", allow_hyphen_values = true)]
    pub grid: String,
    /// Relative pointwise truncation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Most series terms per point.
    #[arg(long)]
    pub terms: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleLaw {
    Z,
    Y,
    K,
    N,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub law: SampleLaw,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Convolution,
    Fourier,
    Montecarlo,
    Moments,
    Monotonicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McLaw {
    Z,
    Y,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Mixing family for `moments` and `monotonicity`.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Law for `montecarlo`.
    #[arg(long, value_enum)]
    pub law: Option<McLaw>,
    /// `min:max:step` of the coordinate (convolution) or frequency (fourier).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Tolerance; defaults to 1e-6 (relative for moments), 1e-12 for monotonicity.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative pointwise truncation tolerance of the series.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Coefficient count for moments (default 200) and monotonicity (default 31).
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Figure1Args {
    #[arg(long, conflicts_with = "df")]
    pub nu: Option<f64>,
    #[arg(long)]
    pub df: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value = "-6:6:0.05", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
}

/// Runs a parsed command, writes its output and returns the exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let out = commands::execute(&cli.command)?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Validate(_) => Format::Json,
        _ => Format::Csv,
    });
    let text = out.render(format);
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(if out.passed() { exit::OK } else { exit::VALIDATION_FAILED })
}

/// Parses `min:max:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid must be min:max:step with step > 0 and min <= max, got {spec}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if n > 10_000_000 {
        return Err(CliError::Usage(format!("grid has {n} points; at most 1e7 allowed")));
    }
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}
