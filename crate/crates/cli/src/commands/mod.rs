pub mod annotate;
pub mod baseline;
pub mod run;
pub mod score;
pub mod validate;

use std::path::Path;
use std::process::ExitCode;

use crate::{EXIT_ENV, EXIT_TASK};

pub fn env_failure(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_ENV)
}

pub fn task_failure(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_TASK)
}

/// Read a file, treating any IO failure as an environment error.
pub fn read_file(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path)
        .map_err(|e| env_failure(format_args!("cannot read {}: {e}", path.display())))
}

/// Parse a taxonomy file: IO problems are environment failures, parse
/// problems are task failures.
pub fn load_taxonomy(path: &Path) -> Result<qmigrate::Taxonomy, ExitCode> {
    let text = read_file(path)?;
    qmigrate::taxonomy::parse_taxonomy(&text)
        .map_err(|e| task_failure(format_args!("{}: {e}", path.display())))
}
