//! `g2chain`: verification suites, spectra, Bethe solutions and table
//! reproduction for the G2 spin chain, with JSON output.
//!
//! Exit status: 0 when every check is within tolerance, 2 on a tolerance
//! failure, 1 on usage or configuration errors.

mod commands;
mod config;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] g2chain::Error),
}

#[derive(Parser, Debug)]
#[command(name = "g2chain", version, about = "Numerical checks for the rational G2 spin chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the check tolerance (must be positive).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Seed for random points and multistart Newton.
    #[arg(long, global = true, default_value_t = 11)]
    pub rng_seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    /// Boundary config file (c1, c2, c3_branch, ct1, ct2, ct3_branch).
    #[arg(long, conflicts_with = "periodic", required_unless_present = "periodic")]
    pub boundary: Option<PathBuf>,
    /// Periodic chain instead of open boundaries.
    #[arg(long)]
    pub periodic: bool,
    #[arg(long)]
    pub n_sites: Option<usize>,
    /// Inhomogeneities, comma separated; entries are real or `a+bi`. Defaults to zeros.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Spectral point as `re,im`.
    #[arg(long, default_value = "0.141421356237309505,0", allow_hyphen_values = true)]
    pub u0: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite (r, boundary, fusion, transfer, periodic, hamiltonian, bethe or all).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Distinct eigenvalues of a transfer matrix and their degeneracies.
    Spectrum {
        #[command(flatten)]
        chain: ChainArgs,
        /// fund, bar or tilde.
        #[arg(long, default_value = "fund")]
        kind: String,
    },
    /// Multistart Newton on the Bethe equations, matched against the spectrum at u0.
    BaeSolve {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        l1: usize,
        /// Number of second-type roots; equal to l1 on the open chain.
        #[arg(long)]
        l2: Option<usize>,
        /// JSON file with an array of root sets, or `random:K`.
        #[arg(long, default_value = "random:200")]
        seeds: String,
        /// Match against the levels of a `spectrum` output instead of diagonalizing.
        #[arg(long)]
        spectrum: Option<PathBuf>,
        /// Also check the functional relations on every solution.
        #[arg(long)]
        relations: bool,
    },
    /// Evaluate the T-Q eigenvalues of a root set.
    TqEval {
        #[command(flatten)]
        chain: ChainArgs,
        /// JSON file holding one root set `{"mu1": [[re, im], ...], "mu2": [...]}`.
        #[arg(long)]
        roots: PathBuf,
        /// Points separated by `;`, each `re,im`; defaults to u0.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Check the functional relations and compare Λ with the spectrum of t.
        #[arg(long)]
        check: bool,
    },
    /// Reproduce the published one- and two-site tables.
    ReproduceTables {
        /// 1, 2 or all.
        #[arg(long, default_value = "all")]
        table: String,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("G2CHAIN_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config(format!("G2CHAIN_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = || -> Result<bool, CliError> {
        init_threads()?;
        if let Some(t) = cli.tol {
            if !(t > 0.0) {
                return Err(CliError::Config(format!("--tol must be positive, got {t}")));
            }
        }
        commands::run(&cli)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
