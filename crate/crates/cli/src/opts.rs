//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "vuix",
    version,
    about = "Rank power-system measurements by their vulnerability to stealthy data-integrity attacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form vulnerability ranking of all measurements (no existing attack).
    Rank(CommonArgs),
    /// Monte Carlo VuIx statistics over random attacked sets.
    Vuix(CommonArgs),
    /// Construct the optimal Gaussian attack (dense, or single-sensor with --sparse).
    Attack(AttackArgs),
    /// Evaluate the attacker cost and the vulnerability of one measurement.
    Cost(CostArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Grid case file (MATPOWER .m or JSON).
    #[arg(long, value_name = "PATH")]
    pub case: PathBuf,

    /// Signal-to-noise ratio of the observations, in dB.
    #[arg(
        long = "snr-db",
        value_name = "REAL",
        default_value_t = 30.0,
        allow_negative_numbers = true
    )]
    pub snr_db: f64,

    /// State correlation parameter of the Toeplitz covariance, in [0, 1).
    #[arg(
        long,
        value_name = "REAL",
        default_value_t = 0.1,
        allow_negative_numbers = true
    )]
    pub rho: f64,

    /// Stealth weight of the attacker objective (cost = I + lambda * D).
    #[arg(
        long,
        value_name = "REAL",
        default_value_t = 2.0,
        allow_negative_numbers = true
    )]
    pub lambda: f64,

    /// Probe variance added on a single sensor when scoring it.
    #[arg(
        long,
        value_name = "REAL",
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub v: f64,

    /// Number of sensors in the random existing attack (Monte Carlo).
    #[arg(long, value_name = "INT", default_value_t = 0)]
    pub k: usize,

    /// Monte Carlo trial count.
    #[arg(long, value_name = "INT", default_value_t = 1000)]
    pub trials: u64,

    /// RNG seed; trial t uses substream t of this seed.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    pub seed: u64,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    /// Output path; stdout when omitted. Multi-table commands in CSV mode
    /// write one file per table, suffixing the stem.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Keep every bus angle in the state (true), or eliminate the
    /// reference-bus column (false).
    #[arg(
        long = "include-slack",
        value_name = "BOOL",
        num_args = 0..=1,
        default_value_t = true,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    pub include_slack: bool,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Construct the optimal single-sensor attack instead of the dense one.
    #[arg(long)]
    pub sparse: bool,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// 1-based measurement id to evaluate.
    #[arg(long, value_name = "ID")]
    pub measurement: usize,
}
