//! `wignerlab` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric or I/O failure,
//! 3 a classical model breached an inequality.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;
pub const EXIT_BREACH: u8 = 3;

pub enum Failure {
    Usage(String),
    /// clap's own error, printed with its formatting (help and version exit 0)
    Clap(clap::Error),
    Numeric(anyhow::Error),
}

impl From<clap::Error> for Failure {
    fn from(e: clap::Error) -> Self {
        Failure::Clap(e)
    }
}

impl From<wignerlab::Error> for Failure {
    fn from(e: wignerlab::Error) -> Self {
        Failure::Numeric(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Numeric(e)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("WIGNERLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("WIGNERLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Numeric(e.into()))
}

fn run() -> Result<commands::Outcome, Failure> {
    let cli = config::parse(std::env::args_os().collect())?;
    configure_threads()?;
    let common = cli.command.common();
    // a negative tolerance demands that much slack
    if !common.tol.is_finite() {
        return Err(Failure::Usage(format!("--tol must be finite, got {}", common.tol)));
    }
    commands::run(&cli.command)
}

fn main() -> ExitCode {
    match run() {
        Ok(outcome) if outcome.breach => ExitCode::from(EXIT_BREACH),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Clap(e)) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
