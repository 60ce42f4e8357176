use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trajloop::{ConfigOverrides, DetectorConfig, ExitMode};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "trajloop", version, about = "Detect reasoning loops in step-embedding trajectories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the detector over a trace file and summarize the events.
    Analyze(AnalyzeArgs),
    /// Live detection: frames on stdin, one JSON event line per step on stdout.
    Stream(StreamArgs),
    /// Generate a synthetic trace.
    Synth(SynthArgs),
    /// First-detection step over a grid of rho_star x stability.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[value(name = "one_shot", alias = "one-shot")]
    OneShot,
    Monitor,
}

impl From<Mode> for ExitMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::OneShot => ExitMode::OneShot,
            Mode::Monitor => ExitMode::Monitor,
        }
    }
}

/// Detector settings shared by every command. Flags override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct DetectorFlags {
    /// Flat TOML file with rho_star, p_max, window, stability, exit_mode.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rho_star: Option<f64>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub stability: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Require identical lags while accumulating entry stability.
    #[arg(long)]
    pub exact_lag_entry: bool,
}

impl DetectorFlags {
    /// Defaults, then the config file, then flags. `default_mode` applies
    /// when neither the file nor the flags choose one.
    pub fn resolve(&self, default_mode: ExitMode) -> Result<DetectorConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                ConfigOverrides::parse(&text)?
            }
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            rho_star: self.rho_star,
            p_max: self.p_max,
            window: self.window,
            stability: self.stability,
            exit_mode: self.mode.map(ExitMode::from),
            exact_lag_entry: self.exact_lag_entry.then_some(true),
        };
        let base = DetectorConfig {
            exit_mode: default_mode,
            ..DetectorConfig::default()
        };
        Ok(file.merged_with(flags).apply(base)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Jsonl,
    Binary,
}

impl From<FileFormat> for trajloop::trace::TraceFormat {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Jsonl => trajloop::trace::TraceFormat::Jsonl,
            FileFormat::Binary => trajloop::trace::TraceFormat::Binary,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Input format; detected from the file contents when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
    /// Write per-step diagnostics as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub detector: DetectorFlags,
}

#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: FileFormat,
    #[command(flatten)]
    pub detector: DetectorFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    #[value(name = "random_walk", aliases = ["random-walk", "walk"])]
    RandomWalk,
    Periodic,
    Composite,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub dim: usize,
    /// Number of steps; defaults to the segment total for composite traces.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub period: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step_scale: f64,
    /// Composite layout, e.g. `walk:40,periodic:24`.
    #[arg(long)]
    pub segments: Option<String>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Output format; `.bin` files default to binary, everything else to JSONL.
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Comma-separated rho_star values; defaults to the configured value.
    #[arg(long)]
    pub rho_grid: Option<String>,
    /// Comma-separated stability values; defaults to the configured value.
    #[arg(long)]
    pub stability_grid: Option<String>,
    #[command(flatten)]
    pub detector: DetectorFlags,
}
