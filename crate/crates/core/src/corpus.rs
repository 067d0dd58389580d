//! Snippet corpus loading and the line-numbering preprocessing step.
//!
//! A corpus directory holds `<id>.src` snippet files (opaque line-oriented
//! text) and `<id>.truth` sidecars with the ground-truth annotations:
//!
//! ```text
//! needs_refactoring: true
//! change: 3 | QSK-046-001 | from qiskit_aer import AerSimulator
//! ```
//!
//! Clean snippets carry an explicit `needs_refactoring: false` sidecar with
//! no change records, so a missing sidecar is always an error rather than a
//! silent "clean" verdict.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipe_table;
use crate::taxonomy::{scenario_by_id, Taxonomy};

/// One source sample, treated as opaque line-oriented text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSnippet {
    pub id: String,
    pub source: String,
    pub line_count: usize,
}

impl CodeSnippet {
    pub fn new(id: impl Into<String>, source: impl Into<String>) -> Self {
        let source = source.into();
        let line_count = count_lines(&source);
        CodeSnippet {
            id: id.into(),
            source,
            line_count,
        }
    }
}

/// One line that must change, with the refactoring the change should
/// produce (empty when the correct action is removal).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedChange {
    pub line_no: usize,
    pub scenario_id: String,
    pub expected_refactoring: String,
}

/// Ground truth for one snippet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub snippet_id: String,
    pub needs_refactoring: bool,
    pub changes: Vec<ExpectedChange>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("snippet file {0:?} has no valid UTF-8 stem")]
    BadFileName(PathBuf),
    #[error("line {line_index} is not a numbered line (expected \"<digits>: \" prefix)")]
    MalformedNumberedLine { line_index: usize },
    #[error("snippet {0}: missing sidecar annotation file")]
    MissingSidecar(String),
    #[error("sidecar {0}.truth has no matching snippet file")]
    OrphanSidecar(String),
    #[error("snippet {snippet_id}: sidecar line {line_index}: {reason}")]
    MalformedSidecar {
        snippet_id: String,
        line_index: usize,
        reason: String,
    },
    #[error("snippet {snippet_id}: change cites unknown scenario {scenario_id}")]
    DanglingScenarioId {
        snippet_id: String,
        scenario_id: String,
    },
    #[error("snippet {snippet_id}: change cites line {line_no}, outside 1..={line_count}")]
    LineOutOfRange {
        snippet_id: String,
        line_no: usize,
        line_count: usize,
    },
    #[error("snippet {0}: needs_refactoring flag disagrees with the change list")]
    InconsistentSidecar(String),
}

/// Number of newline-delimited lines ("a\nb\n" and "a\nb" both have 2).
pub fn count_lines(source: &str) -> usize {
    if source.is_empty() {
        return 0;
    }
    let body = source.strip_suffix('\n').unwrap_or(source);
    body.split('\n').count()
}

/// Prefix every line with `<i>: ` (1-based, no padding).
///
/// Trailing-newline presence is preserved, so the transformation is
/// invertible via [`strip_line_numbers`].
pub fn number_lines(source: &str) -> String {
    if source.is_empty() {
        return String::new();
    }
    let has_trailing = source.ends_with('\n');
    let body = if has_trailing {
        &source[..source.len() - 1]
    } else {
        source
    };
    let mut out = String::with_capacity(source.len() + 4 * count_lines(source));
    for (i, line) in body.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&(i + 1).to_string());
        out.push_str(": ");
        out.push_str(line);
    }
    if has_trailing {
        out.push('\n');
    }
    out
}

/// Inverse of [`number_lines`]: remove the `<digits>: ` prefix from every
/// line. Lines lacking the prefix are an error (1-based index reported).
pub fn strip_line_numbers(numbered: &str) -> Result<String, CorpusError> {
    if numbered.is_empty() {
        return Ok(String::new());
    }
    let has_trailing = numbered.ends_with('\n');
    let body = if has_trailing {
        &numbered[..numbered.len() - 1]
    } else {
        numbered
    };
    let mut out = String::with_capacity(numbered.len());
    for (i, line) in body.split('\n').enumerate() {
        let stripped = strip_one_prefix(line)
            .ok_or(CorpusError::MalformedNumberedLine { line_index: i + 1 })?;
        if i > 0 {
            out.push('\n');
        }
        out.push_str(stripped);
    }
    if has_trailing {
        out.push('\n');
    }
    Ok(out)
}

fn strip_one_prefix(line: &str) -> Option<&str> {
    let digits = line.bytes().take_while(|b| b.is_ascii_digit()).count();
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    rest.strip_prefix(": ")
}

/// Load the `.src` snippet files under `root`, sorted by id.
///
/// No sidecars are read; use [`load_corpus`] when ground truth is needed.
pub fn load_snippets(root: &Path) -> Result<Vec<CodeSnippet>, CorpusError> {
    let mut snippets = Vec::new();
    for path in list_files_with_extension(root, "src")? {
        let id = stem_of(&path)?;
        let source = fs::read_to_string(&path).map_err(|source| CorpusError::Io {
            path: path.clone(),
            source,
        })?;
        snippets.push(CodeSnippet::new(id, source));
    }
    snippets.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(snippets)
}

/// Load snippets plus their ground-truth sidecars, validated against the
/// taxonomy. Pairs come back sorted by snippet id regardless of filesystem
/// enumeration order.
pub fn load_corpus(
    root: &Path,
    taxonomy: &Taxonomy,
) -> Result<Vec<(CodeSnippet, GroundTruth)>, CorpusError> {
    let snippets = load_snippets(root)?;
    let mut sidecars: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in list_files_with_extension(root, "truth")? {
        sidecars.insert(stem_of(&path)?, path);
    }

    let snippet_ids: Vec<&str> = snippets.iter().map(|s| s.id.as_str()).collect();
    if let Some(orphan) = sidecars
        .keys()
        .find(|id| !snippet_ids.contains(&id.as_str()))
    {
        return Err(CorpusError::OrphanSidecar(orphan.clone()));
    }

    let mut pairs = Vec::with_capacity(snippets.len());
    for snippet in snippets {
        let sidecar_path = sidecars
            .get(&snippet.id)
            .ok_or_else(|| CorpusError::MissingSidecar(snippet.id.clone()))?;
        let text = fs::read_to_string(sidecar_path).map_err(|source| CorpusError::Io {
            path: sidecar_path.clone(),
            source,
        })?;
        let truth = parse_sidecar(&snippet.id, &text)?;
        for change in &truth.changes {
            if change.line_no == 0 || change.line_no > snippet.line_count {
                return Err(CorpusError::LineOutOfRange {
                    snippet_id: snippet.id.clone(),
                    line_no: change.line_no,
                    line_count: snippet.line_count,
                });
            }
            if scenario_by_id(taxonomy, &change.scenario_id).is_none() {
                return Err(CorpusError::DanglingScenarioId {
                    snippet_id: snippet.id.clone(),
                    scenario_id: change.scenario_id.clone(),
                });
            }
        }
        pairs.push((snippet, truth));
    }
    Ok(pairs)
}

fn parse_sidecar(snippet_id: &str, text: &str) -> Result<GroundTruth, CorpusError> {
    let malformed = |line_index: usize, reason: &str| CorpusError::MalformedSidecar {
        snippet_id: snippet_id.to_string(),
        line_index,
        reason: reason.to_string(),
    };

    let mut needs_refactoring: Option<bool> = None;
    let mut changes = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() {
            continue;
        }
        let line_index = i + 1;
        if let Some(value) = line.strip_prefix("needs_refactoring:") {
            if needs_refactoring.is_some() {
                return Err(malformed(line_index, "duplicate needs_refactoring line"));
            }
            needs_refactoring = Some(match value.trim() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(malformed(
                        line_index,
                        &format!("expected true|false, found {other:?}"),
                    ))
                }
            });
        } else if let Some(record) = line.strip_prefix("change:") {
            if needs_refactoring.is_none() {
                return Err(malformed(
                    line_index,
                    "change record before needs_refactoring line",
                ));
            }
            let fields = pipe_table::split_fields(record);
            if fields.len() != 3 {
                return Err(malformed(
                    line_index,
                    &format!("expected 3 pipe-separated fields, found {}", fields.len()),
                ));
            }
            let line_no: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| malformed(line_index, "line number is not a positive integer"))?;
            let scenario_id = fields[1].trim().to_string();
            if scenario_id.is_empty() {
                return Err(malformed(line_index, "empty scenario id"));
            }
            let expected_refactoring = pipe_table::unescape_cell(fields[2].trim());
            changes.push(ExpectedChange {
                line_no,
                scenario_id,
                expected_refactoring,
            });
        } else {
            return Err(malformed(line_index, "unrecognized record"));
        }
    }

    let needs_refactoring =
        needs_refactoring.ok_or_else(|| malformed(1, "missing needs_refactoring line"))?;
    if needs_refactoring != !changes.is_empty() {
        return Err(CorpusError::InconsistentSidecar(snippet_id.to_string()));
    }
    Ok(GroundTruth {
        snippet_id: snippet_id.to_string(),
        needs_refactoring,
        changes,
    })
}

fn list_files_with_extension(root: &Path, extension: &str) -> Result<Vec<PathBuf>, CorpusError> {
    let entries = fs::read_dir(root).map_err(|source| CorpusError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| CorpusError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == extension) {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

fn stem_of(path: &Path) -> Result<String, CorpusError> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_string())
        .ok_or_else(|| CorpusError::BadFileName(path.to_path_buf()))
}
