use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ostat_core::experiments::{self, ExperimentConfig, ExperimentKind, OutputFormat};
use ostat_core::Error;

#[derive(Parser)]
#[command(
    name = "ostat",
    version,
    about = "Extremes of order-statistics processes: simulation versus asymptotics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sup exceedance frequencies against the tail expansion.
    Tailprob(Args),
    /// Distance of the normalized sup to the Gumbel law.
    Gumbel(Args),
    /// Normalized moments of the sup along a horizon ladder.
    Moments(Args),
    /// Table of extrapolated generalized Albin constants.
    Albin(Args),
    /// Monte Carlo verification of the normal-comparison bounds.
    Compare(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's output path, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

const EXIT_INVALID: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Tailprob(a) => (ExperimentKind::Tailprob, a),
        Command::Gumbel(a) => (ExperimentKind::Gumbel, a),
        Command::Moments(a) => (ExperimentKind::Moments, a),
        Command::Albin(a) => (ExperimentKind::Albin, a),
        Command::Compare(a) => (ExperimentKind::Compare, a),
    };
    let mut config = match ExperimentConfig::from_path(&args.config, Some(kind)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let format = match args.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => config.output.format,
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let result = match pool.install(|| experiments::run(&config)) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match args.out.or(config.output.path.clone()) {
        Some(path) => {
            if let Err(e) = result.write(&path, format) {
                return fail(&e);
            }
        }
        None => print!("{}", result.render(format)),
    }
    let failures = result.failures();
    if failures > 0 {
        eprintln!(
            "{failures} of {} cases failed verification",
            result.rows.len()
        );
        return ExitCode::from(EXIT_VERIFICATION);
    }
    ExitCode::SUCCESS
}
