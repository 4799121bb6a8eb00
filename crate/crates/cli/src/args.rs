use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "boat", version, about = "Explore hospital discharge cost extracts")]
pub struct Cli {
    /// Column schema (TOML); the bundled discharge schema when omitted.
    #[arg(long, global = true, env = "BOAT_SCHEMA")]
    pub schema: Option<PathBuf>,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a CSV extract into a snapshot directory.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summary statistics for one field.
    Describe {
        #[command(flatten)]
        common: Common,
        /// Field name or role.
        #[arg(long, default_value = "cost")]
        field: String,
    },
    /// Total cost per group for two years, ranked by the later year.
    TopCosts {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        group: String,
        /// Two years, `y0,y1`.
        #[arg(long)]
        years: String,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, default_value_t = 0)]
        skip_top: usize,
    },
    /// Yearly metric per group for the top groups.
    Trend {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = MetricArg::Count)]
        metric: MetricArg,
        /// Inclusive range `y0:y1` or a list `y0,y1,...`.
        #[arg(long)]
        years: String,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Cost distribution against a cap.
    Cap {
        #[command(flatten)]
        common: Common,
        /// Cap in dollars.
        #[arg(long)]
        threshold: String,
        #[arg(long, default_value = "0")]
        hist_lo: String,
        #[arg(long, default_value = "2500")]
        hist_width: String,
        #[arg(long, default_value_t = 60)]
        hist_bins: usize,
    },
    /// Write a synthetic extract and its generation ledger.
    Synth {
        /// Cohort profile (TOML); the bundled profile when omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// CSV extract or snapshot directory.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// `field=value`, `field in a|b` or `field between lo,hi`; repeat to combine.
    #[arg(long = "filter")]
    pub filters: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Count,
    Sum,
    Mean,
}
