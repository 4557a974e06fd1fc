use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hinclust_cli::{commands, RunConfig};
use serde_json::json;

/// Seed-guided motif tensor clustering for typed graphs.
#[derive(Debug, Parser)]
#[command(name = "hinclust", version)]
struct Cli {
    /// Worker threads; defaults to the config value, then to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate motif instances and write one tensor file per motif.
    Transcribe {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit the model and write memberships, labels, weights and the iteration log.
    /// Exits with 2 when the iteration cap is hit before convergence.
    Fit {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print accuracy, micro/macro F1 and NMI as JSON.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Seed labels; these nodes are left out of the scores.
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[arg(long)]
        include_seeds: bool,
    },
    /// Generate a planted-partition graph with truth, seeds and a run config.
    GenPlanted {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_ERROR: u8 = 1;
const EXIT_MAX_ITERS: u8 = 2;

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, record| {
            let line = json!({
                "level": record.level().as_str().to_lowercase(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            writeln!(buf, "{line}")
        })
        .init();
}

fn set_threads(n: Option<usize>) -> Result<()> {
    if let Some(n) = n {
        anyhow::ensure!(n > 0, "threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Transcribe { config } => {
            let cfg = RunConfig::load(&config)?;
            set_threads(cli.threads.or(cfg.threads))?;
            let t = commands::transcribe(&cfg)?;
            let summary: Vec<_> = t
                .terms
                .iter()
                .map(|term| json!({ "motif": term.motif.name, "nnz": term.tensor.nnz() }))
                .collect();
            print_json(&json!({ "motifs": summary }))?;
            Ok(0)
        }
        Command::Fit { config } => {
            let cfg = RunConfig::load(&config)?;
            set_threads(cli.threads.or(cfg.threads))?;
            let summary = commands::fit(&cfg)?;
            print_json(&summary)?;
            if summary.converged {
                Ok(0)
            } else {
                let note = json!({
                    "level": "warn",
                    "message": format!("stopped at max_outer_iters = {} before convergence", cfg.hyper.max_outer_iters),
                });
                eprintln!("{note}");
                Ok(EXIT_MAX_ITERS)
            }
        }
        Command::Evaluate {
            pred,
            truth,
            seeds,
            include_seeds,
        } => {
            set_threads(cli.threads)?;
            let report = commands::evaluate(&pred, &truth, seeds.as_deref(), include_seeds)?;
            print_json(&report)?;
            Ok(0)
        }
        Command::GenPlanted { params, out } => {
            set_threads(cli.threads)?;
            let run_config = commands::gen_planted(&params, &out)?;
            print_json(&json!({ "config": run_config }))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let chain: Vec<String> = e.chain().map(ToString::to_string).collect();
            let diag = json!({ "level": "error", "message": e.to_string(), "causes": chain[1..] });
            eprintln!("{diag}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
