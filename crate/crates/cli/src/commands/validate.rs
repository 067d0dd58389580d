use std::path::Path;
use std::process::ExitCode;

use qmigrate::taxonomy::{has_errors, validate_taxonomy, Severity};

use super::load_taxonomy;
use crate::EXIT_TASK;

pub fn run(path: &Path) -> ExitCode {
    let taxonomy = match load_taxonomy(path) {
        Ok(taxonomy) => taxonomy,
        Err(code) => return code,
    };
    let diagnostics = validate_taxonomy(&taxonomy);
    for diagnostic in &diagnostics {
        match diagnostic.severity {
            Severity::Info => println!("{}", diagnostic.message),
            severity => println!("{severity}: {}", diagnostic.message),
        }
    }
    if has_errors(&diagnostics) {
        ExitCode::from(EXIT_TASK)
    } else {
        ExitCode::SUCCESS
    }
}
