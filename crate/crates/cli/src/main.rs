//! `lierec`: synthesize exponential-flow trajectory datasets on matrix Lie
//! groups, train the increment encoder, evaluate it against the closed-form
//! baseline, and plot the results.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 numerical failure.

mod commands;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use lierec_core::encoder::OptimizerKind;
use lierec_core::lie::GroupKind;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    pub fn from_io(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<lierec_core::Error> for CliError {
    fn from(e: lierec_core::Error) -> Self {
        if e.is_data_error() {
            CliError::Data(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lierec",
    version,
    about = "Recover constant Lie algebra generators from sampled group trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a trajectory dataset (.ljd)
    Gen(GenArgs),
    /// Train the encoder on a dataset; writes a checkpoint (.lem) and a
    /// loss-curve CSV next to it (<out>.loss.csv)
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset; writes a per-trajectory CSV report
    Eval(EvalArgs),
    /// Render an SVG plot plus its backing CSV
    Plot(PlotArgs),
}

fn parse_group(s: &str) -> Result<GroupKind, String> {
    GroupKind::from_str(s).map_err(|e| e.to_string())
}

fn parse_optimizer(s: &str) -> Result<OptimizerKind, String> {
    match s {
        "adam" => Ok(OptimizerKind::Adam),
        "sgd" => Ok(OptimizerKind::Sgd),
        other => Err(format!("unknown optimizer '{other}' (expected adam|sgd)")),
    }
}

fn parse_hidden(s: &str) -> Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated widths, got '{s}'"));
    }
    let parse = |p: &str| -> Result<usize, String> {
        let n: usize = p.trim().parse().map_err(|_| format!("bad width '{p}'"))?;
        if n == 0 {
            return Err("hidden widths must be positive".into());
        }
        Ok(n)
    };
    Ok([parse(parts[0])?, parse(parts[1])?])
}

#[derive(Args)]
pub struct GenArgs {
    /// Group: se2 | se3 | so3 | sl2r
    #[arg(long, value_parser = parse_group)]
    pub(crate) group: GroupKind,
    /// Number of trajectories
    #[arg(long, default_value_t = 5000)]
    pub(crate) n: usize,
    /// Steps per trajectory (poses = steps + 1)
    #[arg(long, default_value_t = 20)]
    pub(crate) steps: usize,
    /// Sampling interval in seconds
    #[arg(long, default_value_t = 0.1)]
    pub(crate) dt: f64,
    /// Generators are drawn uniformly from [-bound, bound] per coordinate
    #[arg(long, default_value_t = 1.0)]
    pub(crate) bound: f64,
    /// Std deviation of the per-step Gaussian generator perturbation
    #[arg(long, default_value_t = 0.0)]
    pub(crate) sigma: f64,
    /// RNG seed (defaults to $LIEREC_SEED, then 0)
    #[arg(long, env = "LIEREC_SEED", default_value_t = 0)]
    pub(crate) seed: u64,
    /// Output dataset path
    #[arg(long)]
    pub(crate) out: PathBuf,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Training dataset (.ljd)
    #[arg(long)]
    pub(crate) data: PathBuf,
    /// Output checkpoint path (.lem); the loss curve goes to <out>.loss.csv
    #[arg(long)]
    pub(crate) out: PathBuf,
    /// Hidden layer widths as "H1,H2"
    #[arg(long, default_value = "64,64", value_parser = parse_hidden)]
    pub(crate) hidden: [usize; 2],
    /// Learning rate
    #[arg(long, default_value_t = 1e-3)]
    pub(crate) lr: f64,
    #[arg(long, default_value_t = 50)]
    pub(crate) epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub(crate) batch: usize,
    /// RNG seed for init/shuffling (defaults to $LIEREC_SEED, then 0)
    #[arg(long, env = "LIEREC_SEED", default_value_t = 0)]
    pub(crate) seed: u64,
    /// adam | sgd
    #[arg(long, default_value = "adam", value_parser = parse_optimizer)]
    pub(crate) optimizer: OptimizerKind,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Trained checkpoint (.lem)
    #[arg(long)]
    pub(crate) model: PathBuf,
    /// Evaluation dataset (.ljd)
    #[arg(long)]
    pub(crate) data: PathBuf,
    /// Output CSV report path
    #[arg(long)]
    pub(crate) out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, clap::ValueEnum)]
pub enum PlotKind {
    /// Training/validation loss curve (needs --report)
    Loss,
    /// Predicted-vs-true trajectory overlay (needs --model and --data)
    Traj,
    /// Estimated-vs-true generator scatter (needs --model and --data)
    Generator,
}

#[derive(Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub(crate) kind: PlotKind,
    /// Output SVG path; backing data goes to <out>.csv
    #[arg(long)]
    pub(crate) out: PathBuf,
    /// Loss-curve CSV (for --kind loss)
    #[arg(long)]
    pub(crate) report: Option<PathBuf>,
    /// Checkpoint path (for traj/generator)
    #[arg(long)]
    pub(crate) model: Option<PathBuf>,
    /// Dataset path (for traj/generator)
    #[arg(long)]
    pub(crate) data: Option<PathBuf>,
    /// Trajectory index within the dataset (for --kind traj)
    #[arg(long, default_value_t = 0)]
    pub(crate) index: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            let first_line = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first_line} (run with --help for usage)");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Train(args) => commands::train(args),
        Command::Eval(args) => commands::eval(args),
        Command::Plot(args) => commands::plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
