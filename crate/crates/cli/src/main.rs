//! `halfspace`: batch front end for the half-space numerical lab.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration or parse
//! error.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CorrectionArg, Format};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files (exit 2).
    Input(String),
    /// The computation failed or a check did not pass (exit 1).
    Numeric(String),
}

impl From<halfspace_core::Error> for CliError {
    fn from(e: halfspace_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "halfspace", version, about = "Numerical lab for -Δu = u^-γ in the half-space")]
struct Cli {
    /// JSON file with parameters; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the power solution C_γ t^{2/(γ+1)}.
    Exact(ExactArgs),
    /// Solve for the profile with a prescribed slope at infinity.
    Shoot(ShootArgs),
    /// Apply the scaling group to a profile.
    Scale(ScaleArgs),
    /// Check the power, linear and gradient bounds on a profile or field.
    Verify(VerifyArgs),
    /// Solve on a truncated half-plane rectangle.
    Halfplane(HalfplaneArgs),
    /// Summary of one profile with plots, optionally with half-plane runs.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct Common {
    /// Output directory, created if missing [default: .]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct ExactArgs {
    /// Singular exponent γ > 1 [default: 2]
    #[arg(long)]
    gamma: Option<f64>,
    /// Right end of the sample interval [default: 10]
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of intervals [default: 1000]
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct ShootArgs {
    /// Singular exponent γ > 1 [default: 2]
    #[arg(long)]
    gamma: Option<f64>,
    /// Slope at infinity, > 0 [default: 1]
    #[arg(long)]
    slope: Option<f64>,
    /// Relative tolerance of the integrator [default: 1e-12]
    #[arg(long)]
    tol: Option<f64>,
    /// Largest accepted disagreement between the two constructions [default: 1e-4]
    #[arg(long)]
    route_tol: Option<f64>,
    /// Far-field truncation [default: 1e4]
    #[arg(long)]
    horizon: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct ScaleArgs {
    /// Profile file (CSV `t,v,dv` or JSON)
    #[arg(long)]
    input: Option<PathBuf>,
    /// γ of a CSV input [default: 2]
    #[arg(long)]
    gamma: Option<f64>,
    /// Scaling factor λ: t ↦ λ^{-2/(γ+1)} v(λt)
    #[arg(long)]
    lambda: Option<f64>,
    /// Target slope at infinity (alternative to --lambda)
    #[arg(long)]
    slope: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Profile (`t,v,dv`) or field (`x,z,u`) file, CSV or JSON
    #[arg(long)]
    input: Option<PathBuf>,
    /// γ of a CSV input [default: 2]
    #[arg(long)]
    gamma: Option<f64>,
    /// Strip height for the power and gradient bounds [default: 1]
    #[arg(long)]
    strip: Option<f64>,
    /// Height beyond which linear growth and the far gradient are checked
    /// [default: extent / 10]
    #[arg(long)]
    far_strip: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct HalfplaneArgs {
    /// Singular exponent γ > 1 [default: 2]
    #[arg(long)]
    gamma: Option<f64>,
    /// Slope of the profile supplying the top value [default: 1]
    #[arg(long)]
    slope: Option<f64>,
    /// Rectangle width [default: 8]
    #[arg(long)]
    width: Option<f64>,
    /// Rectangle height [default: 4]
    #[arg(long)]
    height: Option<f64>,
    /// Mesh size; must divide width and height [default: 0.0625]
    #[arg(long)]
    h: Option<f64>,
    /// Amplitude a of the data factor 1 + a sin(π x'/width) [default: 0]
    #[arg(long)]
    perturb: Option<f64>,
    /// Correction of the singular source near the boundary [default: series]
    #[arg(long, value_enum)]
    correction: Option<CorrectionArg>,
    /// Newton tolerance [default: 1e-11]
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct ReportArgs {
    /// Singular exponent γ > 1 [default: 2]
    #[arg(long)]
    gamma: Option<f64>,
    /// Slope at infinity [default: 1]
    #[arg(long)]
    slope: Option<f64>,
    /// Strip height for the power and gradient bounds [default: 1]
    #[arg(long)]
    strip: Option<f64>,
    /// Height for linear growth and the far gradient [default: extent / 10]
    #[arg(long)]
    far_strip: Option<f64>,
    /// Half-plane report files to include in the symmetry-decay plot
    #[arg(long, num_args = 1..)]
    halfplane: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::RunConfig::load(cli.config.as_deref()).and_then(|cfg| match &cli.cmd {
        Command::Exact(a) => commands::exact(a, &cfg),
        Command::Shoot(a) => commands::shoot(a, &cfg),
        Command::Scale(a) => commands::scale(a, &cfg),
        Command::Verify(a) => commands::verify(a, &cfg),
        Command::Halfplane(a) => commands::halfplane(a, &cfg),
        Command::Report(a) => commands::report(a, &cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
