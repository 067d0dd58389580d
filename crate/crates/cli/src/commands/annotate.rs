use std::path::Path;
use std::process::ExitCode;

use qmigrate::corpus::number_lines;

use super::read_file;

pub fn run(source_path: &Path) -> ExitCode {
    match read_file(source_path) {
        Ok(source) => {
            print!("{}", number_lines(&source));
            ExitCode::SUCCESS
        }
        Err(code) => code,
    }
}
