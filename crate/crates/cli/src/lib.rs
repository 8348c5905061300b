//! Command-line front end: builds or loads a zero set, runs one check or
//! sweep, and writes a CSV table preceded by a `#` header block.
//!
//! Exit codes: 0 on success, 1 on usage or domain errors, 2 when a
//! verification that is expected to pass fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{RunConfig, StackChoice};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(invthresh::Error),
    /// A verification that should pass did not.
    Failed(String),
}

impl From<invthresh::Error> for CliError {
    fn from(e: invthresh::Error) -> Self {
        Self::Compute(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Compute(e) => write!(f, "error: {e}"),
            Self::Failed(m) => write!(f, "FAIL: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Failed(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "invthresh",
    version,
    about = "Zero sets with a prescribed invertibility threshold"
)]
struct Cli {
    /// TOML file with default values for any option.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Leave the timestamp line out of output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a stack (uniform or adaptive) and optionally cache it.
    #[command(allow_negative_numbers = true)]
    Construct(RunConfig),
    /// Grid check that the zeros' ε-neighbourhoods cover the strips.
    #[command(allow_negative_numbers = true)]
    VerifyCovering(RunConfig),
    /// Certified |B| on the imaginary axis against the closed-form bounds.
    #[command(allow_negative_numbers = true)]
    VerifyBounds(RunConfig),
    /// Grid minimum of |f| + |B|.
    #[command(allow_negative_numbers = true)]
    Corona(RunConfig),
    /// Grid minimum of |B| away from the ε-neighbourhoods of the zeros.
    #[command(allow_negative_numbers = true)]
    Gmn(RunConfig),
    /// |B| and the divergence 1/|B| - 1 at the witness points.
    #[command(allow_negative_numbers = true)]
    Witness(RunConfig),
    /// Finite-section inverse norms against δ, with the η bounds.
    #[command(allow_negative_numbers = true)]
    SweepC1(RunConfig),
    /// Exhaustive partition search on the block operator.
    #[command(allow_negative_numbers = true)]
    RicDemo(RunConfig),
    /// Zero coordinates and tangent circles for the layout picture.
    #[command(allow_negative_numbers = true)]
    Figure1(RunConfig),
}

impl Command {
    fn split(self) -> (&'static str, RunConfig) {
        match self {
            Self::Construct(c) => ("construct", c),
            Self::VerifyCovering(c) => ("verify-covering", c),
            Self::VerifyBounds(c) => ("verify-bounds", c),
            Self::Corona(c) => ("corona", c),
            Self::Gmn(c) => ("gmn", c),
            Self::Witness(c) => ("witness", c),
            Self::SweepC1(c) => ("sweep-c1", c),
            Self::RicDemo(c) => ("ric-demo", c),
            Self::Figure1(c) => ("figure1", c),
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (name, flags) = cli.command.split();
    let file = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let cfg = flags.over(file)?;
    config::check_ranges(&cfg)?;
    let ctx = commands::Context {
        command: name,
        timestamp: !cli.no_timestamp,
    };
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            pool.install(|| commands::dispatch(&ctx, cfg))
        }
        None => commands::dispatch(&ctx, cfg),
    }
}
