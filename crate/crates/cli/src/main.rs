//! `torus-obstruct`: certify commuting hyperbolic pairs in `SL_d(Z)` and
//! decide whether the universal cover of `SL_d(R)` splits over them.
//!
//! Exit codes: 0 answered (including negative answers), 2 bad input,
//! 3 internal invariant violation.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use commands::CliError;

const JOBS_ENV: &str = "TORUS_OBSTRUCT_JOBS";

#[derive(Debug, Parser)]
#[command(name = "torus-obstruct", version, about)]
struct Cli {
    /// Worker threads for unit search and exhaustive oracle sweeps
    /// (overridden by TORUS_OBSTRUCT_JOBS).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Refinement rounds for the unit independence certificate.
    #[arg(long, global = true, default_value_t = torus_obstruct::numberfield::DEFAULT_PRECISION_BUDGET)]
    precision_budget: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify the field and units or matrices of an input file, or re-verify a certificate.
    Verify { file: PathBuf },
    /// Decide the splitting obstruction for the pair given in an input file.
    Obstruct {
        file: PathBuf,
        /// Pad with a positive block up to this dimension.
        #[arg(long)]
        d: Option<usize>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an obstructed pair in dimension d and emit its certificate.
    Construct {
        #[arg(long)]
        d: usize,
        /// Input file whose field supplies the positive block.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the pairing formula with the Spin lift of the commutator loop.
    #[command(group(ArgGroup::new("mode").required(true).args(["exhaustive", "spec"])))]
    Oracle {
        #[arg(long)]
        d: usize,
        /// Every ordered pair of even sign patterns.
        #[arg(long)]
        exhaustive: bool,
        /// JSON file with sign patterns "s1" and "s2".
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Increments per rotation plane.
        #[arg(long, default_value_t = torus_obstruct::clifford_oracle::DEFAULT_STEPS)]
        steps: usize,
        /// Print the lift along the loop.
        #[arg(long, conflicts_with = "exhaustive")]
        trace: bool,
    },
    /// List units with bounded coefficients as JSON lines.
    Search {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        bound: i64,
    },
    /// Group certificates by their characteristic polynomial pairs.
    Catalog {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn resolve_jobs(flag: usize) -> Result<usize, CliError> {
    let jobs = match std::env::var(JOBS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Input(format!("{JOBS_ENV}={v:?} is not a positive integer")))?,
        Err(_) => flag,
    };
    if jobs == 0 {
        return Err(CliError::Input("jobs must be at least 1".into()));
    }
    Ok(jobs)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let jobs = resolve_jobs(cli.jobs)?;
    match cli.command {
        Command::Verify { file } => commands::verify(&file, cli.precision_budget),
        Command::Obstruct { file, d, out } => commands::obstruct(&file, d, out.as_deref(), jobs),
        Command::Construct { d, field, out } => {
            commands::construct(d, field.as_deref(), out.as_deref(), jobs)
        }
        Command::Oracle {
            d,
            exhaustive,
            spec,
            steps,
            trace,
        } => match spec {
            Some(file) if !exhaustive => commands::oracle_spec(d, &file, steps, trace),
            _ => commands::oracle_exhaustive(d, steps, jobs),
        },
        Command::Search { field, bound } => commands::search(&field, bound, jobs),
        Command::Catalog { files } => commands::catalog(&files),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("torus-obstruct: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
