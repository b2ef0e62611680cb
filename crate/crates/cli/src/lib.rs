//! `qstiefel` command line: relative SVDs, admissibility, cover checks,
//! LS-category bounds and Haar sampling.
//!
//! Exit codes: 0 success; 1 negative answer (block not admissible, cover
//! hole found) or internal failure; 2 input rejected on mathematical
//! grounds (not symplectic, inadmissible center); 3 unreadable input or bad
//! arguments.

mod commands;
pub mod matrix_file;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use matrix_file::MatrixFile;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qstiefel",
    version,
    about = "Quaternionic Stiefel manifold toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Haar samples for cover checks.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    /// Tolerance for symplectic and admissibility checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative SVD of a symplectic matrix with respect to its bottom-right k x k block.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Whether a square block P can be the bottom of a frame in X_{n,k}.
    Admissible {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Also produce the canonical completion T.
        #[arg(long)]
        complete: bool,
        /// Write T here instead of into the report.
        #[arg(long, requires = "complete")]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check that a family of Cayley sets covers Sp(k).
    VerifyCover {
        #[arg(value_enum)]
        family: FamilyKind,
        /// Size of Sp(k); required for the spk families.
        #[arg(long)]
        k: Option<usize>,
        /// Family file for `custom`.
        #[arg(long = "family", value_name = "FILE")]
        family_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SamplerKind::Sp)]
        sampler: SamplerKind,
        /// Where uncovered frames are written.
        #[arg(long, default_value = "witness.json")]
        witness_out: PathBuf,
        /// Skip the sign-diagonal probe frames.
        #[arg(long)]
        no_probes: bool,
        /// Threshold on the membership margin.
        #[arg(long, default_value_t = qstiefel::covers::MEMBERSHIP_TOL)]
        membership_tol: f64,
    },
    /// LS-category bounds for X_{n,k}; without arguments, the reference table.
    Bounds {
        #[arg(long, requires = "k")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
    },
    /// Haar samples from Sp(n) or X_{n,k}.
    Sample {
        #[arg(value_enum)]
        what: SampleKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        /// Number of matrices; more than one writes a JSON array.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Sp2,
    SpkJ0,
    SpkJ1,
    SpkJ2,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    /// Haar P in Sp(k) embedded as [0; P].
    Sp,
    /// Haar frames on all of X_{n,k}.
    Stiefel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Sp,
    Stiefel,
}

/// A failed run: exit code plus a message for stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn rejected(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_REJECTED,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NEGATIVE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.samples == 0 {
            return Err(CliError::input("--samples must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::input("--tol must be positive"));
        }
        Ok(())
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    cli.config.validate()?;
    commands::dispatch(&cli.command, &cli.config)
}
