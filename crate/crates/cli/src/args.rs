use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Pricing, sensitivities and curve data for amortizing perpetual options.
///
/// Rates, volatilities and amortization rates are decimals (0.05, not 5).
/// Unset options fall back to the `--config` file, then to
/// S = K = 100, r = 0.05, σ = 0.5, q = 0.1.
#[derive(Debug, Parser)]
#[command(name = "ampo", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Premium, exercise boundary, regime and exponents.
    Price,
    /// Delta, gamma, theta and vega.
    Greeks {
        /// Report vega per 1% vol point instead of per unit of σ.
        #[arg(long)]
        vega_per_point: bool,
    },
    /// Sensitivities to the amortization rate.
    Statics,
    /// Curve data behind the three worked examples.
    Examples {
        /// 1: effective maturity/notional, 2: gamma and theta ratios,
        /// 3: positional vega per strategy.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
    },
    /// Amortization rate maximizing positional vega.
    Optimize,
    /// Lattice, ODE-residual and finite-difference checks of one contract.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub strike: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub vol: Option<f64>,
    /// Amortization rate q.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub amort: Option<f64>,
    /// Exponent convention: `published` or `ode`.
    #[arg(long, global = true)]
    pub exponents: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q_max: Option<f64>,
    /// Number of grid points (scan points for `optimize` and `examples 3`).
    #[arg(long, global = true)]
    pub q_steps: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub budget: Option<f64>,
    /// `call`, `put` or `straddle`.
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Defaults to $AMPO_OUTPUT, then `table`.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// `key = value` file, or JSON previously written by `--output json`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Lattice steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Lattice horizon in years; defaults to min(50/q, 200).
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Largest accepted relative change when the lattice step count halves.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// Scale the premium fed to the ODE residual by (1 + EPS).
    #[arg(long, value_name = "EPS", allow_negative_numbers = true)]
    pub perturb_premium: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Table => "table",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Some(OutputFormat::Json),
            "csv" => Some(OutputFormat::Csv),
            "table" => Some(OutputFormat::Table),
            _ => None,
        }
    }
}
