//! The persisted findings-file format shared by `run`, `baseline`, and
//! `score`: one `<snippet_id>.<mode>.findings.json` document per snippet.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use qmigrate::response_parser::MigrationFinding;
use qmigrate::PromptMode;

#[derive(Debug, Serialize, Deserialize)]
pub struct FindingsDoc {
    pub snippet_id: String,
    pub mode: PromptMode,
    pub findings: Vec<MigrationFinding>,
}

pub fn findings_file_name(snippet_id: &str, mode: PromptMode) -> String {
    format!("{snippet_id}.{}.findings.json", mode.token())
}

pub fn response_file_name(snippet_id: &str, mode: PromptMode) -> String {
    format!("{snippet_id}.{}.resp.txt", mode.token())
}

/// Serialize one findings document (stable field order, trailing newline).
pub fn to_json(doc: &FindingsDoc) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("findings serialize");
    text.push('\n');
    text
}

pub fn load(path: &Path) -> Result<FindingsDoc> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
