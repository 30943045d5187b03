//! `gtlab`: experiments on Gowers norms, the primes majorant and arithmetic
//! progressions, with CSV output.

mod cache;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gtlab_core::GtError;

#[derive(Parser, Debug)]
#[command(name = "gtlab", version, about = "Gowers norms, pseudorandom weights and arithmetic progressions on Z_N")]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// key=value file of defaults; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cache directory (default: $GTLAB_CACHE, else ./.gtlab-cache).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gowers uniformity norm of a function on Z_N.
    Gowers(commands::gowers::GowersArgs),
    /// Build and check the pseudorandom weight.
    #[command(subcommand)]
    Weight(commands::weight::WeightCommand),
    /// Energy-increment decomposition f = g + h.
    Decompose(commands::decompose::DecomposeArgs),
    /// Progression averages and prime progressions.
    #[command(subcommand)]
    Ap(commands::ap::ApCommand),
    /// Sieve tables, optionally saved in GTS1 format.
    Sieve(commands::misc::SieveArgs),
    /// Registered norm, dual and form-family strategies.
    Strategies,
}

/// Where a function on Z_N comes from.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Constant function with value C (needs --n).
    #[arg(long = "const", value_name = "C", allow_negative_numbers = true)]
    constant: Option<f64>,
    /// Point mass at 0 (needs --n).
    #[arg(long)]
    delta0: bool,
    /// Indicator of [0, N/2) (needs --n).
    #[arg(long)]
    half: bool,
    /// A GTF1 file.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// The prime-supported f of the weight, divided by c (--n is N_target).
    #[arg(long)]
    weight: bool,
}

/// Parameters of the weight.
#[derive(Args, Debug, Clone, Copy)]
pub struct WeightParams {
    /// Progression length minus one.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// R = N^alpha, alpha in (0, 1/4].
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Smallness cutoff for the W-trick (default: ln ln N, capped).
    #[arg(long)]
    w: Option<f64>,
}

/// Exit statuses.
const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_FAIL: u8 = 3;

pub enum Outcome {
    Done,
    Verdict(bool),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<GtError>() {
        Some(e) if e.is_infeasible() => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if let Some(threads) = cli.threads {
        anyhow::ensure!(threads > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let ctx = commands::Context {
        out: cli.out,
        cache: cache::cache_dir(cli.cache.as_deref()),
    };
    match cli.command {
        Command::Gowers(a) => commands::gowers::run(&ctx, a),
        Command::Weight(c) => commands::weight::run(&ctx, c),
        Command::Decompose(a) => commands::decompose::run(&ctx, a),
        Command::Ap(c) => commands::ap::run(&ctx, c),
        Command::Sieve(a) => commands::misc::sieve(&ctx, a),
        Command::Strategies => commands::misc::strategies(&ctx),
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Done | Outcome::Verdict(true)) => ExitCode::SUCCESS,
        Ok(Outcome::Verdict(false)) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
