//! Batch experiment driver: dataset generation, training, solver evaluation,
//! exact scoring, and scheduling simulation, all seeded and reproducible.

mod commands;
mod config;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "linksched", version, about = "MWIS solvers and wireless link-scheduling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config file for the command.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides LINKSCHED_SEED; default 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides LINKSCHED_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for instance-level parallelism; overrides LINKSCHED_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
    /// Overwrite a non-empty output directory.
    #[arg(long)]
    force: bool,
    /// Also emit decorative SVG plots next to the CSVs.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset of random conflict graphs with uniform weights.
    GenData(RunArgs),
    /// Train an embedding model (dpg, crts, or dqn trainer).
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Resume from an existing model file instead of a fresh init.
        #[arg(long)]
        init_model: Option<PathBuf>,
    },
    /// Score solvers against the exact oracle on a test set.
    Eval(RunArgs),
    /// Run the time-slotted scheduling simulation.
    Simulate(RunArgs),
    /// Solve one graph file exactly and print the optimum.
    Exact {
        /// Graph JSON (or CSV edge list) to solve.
        graph: PathBuf,
        /// Branch-and-bound node budget.
        #[arg(long, default_value_t = 20_000_000)]
        node_limit: u64,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 30.0)]
        time_limit: f64,
    },
}

/// Resolved common settings after CLI/env merging.
pub(crate) struct Context {
    pub config_text: String,
    pub seed: u64,
    pub out: PathBuf,
    pub force: bool,
    pub svg: bool,
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn resolve(run: &RunArgs) -> anyhow::Result<Context> {
    let seed = run.seed.or_else(|| env_u64("LINKSCHED_SEED")).unwrap_or(0);
    let out = run
        .out
        .clone()
        .or_else(|| std::env::var("LINKSCHED_OUT").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let workers = run.workers.or_else(|| env_u64("LINKSCHED_WORKERS").map(|w| w as usize));
    if let Some(w) = workers {
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().ok();
    }
    let force = run.force || std::env::var("LINKSCHED_FORCE").is_ok_and(|v| v == "1");
    let config_text = std::fs::read_to_string(&run.config)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", run.config.display()))?;
    Ok(Context { config_text, seed, out, force, svg: run.svg })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through here too; those are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::GenData(run) => resolve(run).and_then(commands::gen_data::run),
        Command::Train { run, init_model } => {
            resolve(run).and_then(|ctx| commands::train::run(ctx, init_model.clone()))
        }
        Command::Eval(run) => resolve(run).and_then(commands::eval::run),
        Command::Simulate(run) => resolve(run).and_then(commands::simulate::run),
        Command::Exact { graph, node_limit, time_limit } => {
            commands::exact::run(graph, *node_limit, *time_limit)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<manifest::UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
