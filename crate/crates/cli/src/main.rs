//! Experiments around equilibrium measures, weighted-midpoint discretization
//! and CG convergence bounds. Curves go to CSV, verification reports to JSON.

mod commands;
mod config;
mod error;
mod families;
mod output;

use clap::{Args, Parser, Subcommand};

use config::{CommonArgs, ExperimentConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "logpot", version, about = "Potential theory and CG bound experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the discretization constants over density families and degrees.
    VerifyConstants(VerifyArgs),
    /// Emit the data behind one of the three CG figures.
    Figure(FigureArgs),
    /// Partition, nodes and error grid for one density.
    Discretize(CommonOnly),
    /// Relative energy norm errors of CG on a diagonal model matrix.
    Cg(CgArgs),
    /// Condition number, outlier, envelope and integral bounds.
    Bounds(CommonOnly),
}

#[derive(Args)]
struct CommonOnly {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Random (x, t) pairs per density for the mean value check.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FigureArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Figure number: 1, 2 or 3.
    #[arg(long)]
    which: Option<u8>,
}

#[derive(Args)]
struct CgArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also run in double precision and report where the two curves part.
    #[arg(long)]
    compare_double: bool,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::VerifyConstants(a) => {
            let mut cfg = ExperimentConfig::resolve(&a.common)?;
            cfg.pairs = a.pairs.or(cfg.pairs);
            cfg.seed = a.seed.or(cfg.seed);
            commands::verify::run(&cfg)
        }
        Command::Figure(a) => {
            let mut cfg = ExperimentConfig::resolve(&a.common)?;
            cfg.which = a.which.or(cfg.which);
            let which = cfg.which.ok_or_else(|| CliError::Validation("figure needs --which 1|2|3".into()))?;
            commands::tables::run_figure(&cfg, which)
        }
        Command::Discretize(a) => commands::discretize::run(&ExperimentConfig::resolve(&a.common)?),
        Command::Cg(a) => {
            let cfg = ExperimentConfig::resolve(&a.common)?;
            let compare = a.compare_double || cfg.compare_double.unwrap_or(false);
            commands::tables::run_cg_command(&cfg, compare)
        }
        Command::Bounds(a) => commands::tables::run_bounds(&ExperimentConfig::resolve(&a.common)?),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
