//! Batch front end over the `fdakit` library.
//!
//! Every subcommand reads a dataset (CSV or JSON), runs one library call and
//! prints JSON, or SVG for `plot`. Failures print a single JSON line
//! `{"error": <name>, "message": <text>}` on stderr and set the exit code:
//! 1 for usage errors, 2 for unreadable data, 3 for numerical failures.

mod args;
mod commands;
mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use fdakit::{ErrorClass, FdaError};

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "FDA_KIT_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(FdaError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Library(e) => match e.class() {
                ErrorClass::Usage => EXIT_USAGE,
                ErrorClass::Data => EXIT_DATA,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Library(e) => e.name(),
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Library(e) => e.to_string(),
        }
    }
}

impl From<FdaError> for CliError {
    fn from(e: FdaError) -> Self {
        CliError::Library(e)
    }
}

fn report(stderr: &mut dyn Write, error: &CliError) -> i32 {
    let line = serde_json::json!({ "error": error.name(), "message": error.message() });
    let _ = writeln!(stderr, "{line}");
    error.exit_code()
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_VAR) {
        let threads: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            let first = first.trim_start_matches("error: ").to_string();
            return report(stderr, &CliError::Usage(first));
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| commands::execute(&cli.command)));
    let body = match outcome {
        Ok(body) => body,
        Err(e) => return report(stderr, &e),
    };
    let written = match cli.command.out() {
        Some(path) => fs::write(path, body.as_bytes()),
        None => stdout.write_all(body.as_bytes()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => report(stderr, &CliError::Library(e.into())),
    }
}
