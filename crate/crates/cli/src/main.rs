//! `curvepull`: pullback orbits, sweeps, verification suites and spectral
//! checks from the command line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "curvepull", version, about = "Exact pullback dynamics of curves under quadratic Thurston maps")]
pub struct Cli {
    /// Built-in map name, map file path, or a name found in CURVEPULL_MAP_PATH.
    #[arg(long, global = true)]
    pub map: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads for sweeps; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pullback orbit of one curve.
    Orbit(OrbitArgs),
    /// Run identity checks for the built-in maps.
    Verify(VerifyArgs),
    /// Classify every curve with a short conjugator.
    Sweep(SweepArgs),
    /// Leading eigenvalue and exact contraction test.
    Spectra(SpectraArgs),
    /// Describe a map definition.
    Mapinfo,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    /// `AXIS` or `AXIS^(WORD)`.
    #[arg(long)]
    pub curve: String,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// table7, recursions, prop84, lemma83 or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Largest `n` for the section checks.
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub max_len: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
}

#[derive(Args, Debug)]
pub struct SpectraArgs {
    /// Matrix file: `n`, then `n` rows of `n` entries (`p/q` or integers).
    #[arg(long, conflicts_with_all = ["cycle_of", "curve"])]
    pub matrix: Option<PathBuf>,
    /// Use the transition matrix of the cycle that `--curve` falls into.
    #[arg(long, requires = "curve")]
    pub cycle_of: bool,
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Usage(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Failure::Usage(msg) = &f {
                eprintln!("error: {msg}");
            }
            ExitCode::from(f.exit_code())
        }
    }
}
