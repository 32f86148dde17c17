use std::fmt;

use passguess_core::{CorpusError, TheoryError};
use serde_json::json;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_MISSING_STORE: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
/// Matches `EX_USAGE`; clap's own code 2 is taken by the missing-store case.
pub const EXIT_USAGE: u8 = 64;

/// Failures raised by the CLI itself rather than the libraries.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    NoStore,
    Parse {
        source: String,
        line: usize,
        message: String,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::NoStore => f.write_str("no store given: pass --store or set PASSGUESS_STORE"),
            CliError::Parse {
                source,
                line,
                message,
            } => write!(f, "{source}:{line}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Usage(_) => (EXIT_USAGE, "usage"),
                CliError::NoStore => (EXIT_MISSING_STORE, "store_missing"),
                CliError::Parse { .. } => (EXIT_PARSE, "parse"),
            };
        }
        if let Some(e) = cause.downcast_ref::<CorpusError>() {
            match e {
                CorpusError::StoreMissing(_) => return (EXIT_MISSING_STORE, "store_missing"),
                CorpusError::Parse { .. } => return (EXIT_PARSE, "parse"),
                _ => {}
            }
        }
        if let Some(e) = cause.downcast_ref::<TheoryError>() {
            return match e {
                TheoryError::Parse { .. } => (EXIT_PARSE, "parse"),
                TheoryError::Io(_) => (EXIT_FAILURE, "io"),
                _ => (EXIT_USAGE, "usage"),
            };
        }
    }
    (EXIT_FAILURE, "error")
}

pub fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

/// Writes a single-line JSON error record to stderr.
pub fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}
