//! A deterministic, model-free scanner that flags candidate migration
//! lines by matching taxonomy artifact keywords against snippet lines.
//!
//! The matching is purely lexical: a keyword hits a line only when it
//! occurs as a whole identifier token (not embedded in a longer
//! identifier). Known blindness to aliased imports is accepted; this is a
//! comparison baseline, not an analyzer.

use serde::{Deserialize, Serialize};

use crate::corpus::CodeSnippet;
use crate::response_parser::{MigrationFinding, ScenarioRef};
use crate::taxonomy::{ScenarioCategory, Taxonomy};

/// How a keyword hit a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitKind {
    /// The line is an `import `/`from ` statement.
    ImportLine,
    /// Any other line containing the keyword.
    UsageLine,
}

/// One keyword occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KeywordHit {
    pub line_no: usize,
    pub scenario_id: String,
    pub matched_keyword: String,
    pub kind: HitKind,
}

/// True when `keyword` occurs in `line` as a whole identifier token:
/// neither neighbour is alphanumeric or `_`. Dotted keywords
/// ("qiskit.tools") participate the same way, bounded at their ends.
pub fn contains_token(line: &str, keyword: &str) -> bool {
    if keyword.is_empty() {
        return false;
    }
    for (pos, _) in line.match_indices(keyword) {
        let before_ok = line[..pos].chars().last().is_none_or(|c| !is_ident_char(c));
        let after_ok = line[pos + keyword.len()..]
            .chars()
            .next()
            .is_none_or(|c| !is_ident_char(c));
        if before_ok && after_ok {
            return true;
        }
    }
    false
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_import_line(line: &str) -> bool {
    let trimmed = line.trim_start();
    trimmed.starts_with("import ") || trimmed.starts_with("from ")
}

/// Scan one snippet against every scenario's artifact keywords.
///
/// Hits come back sorted by (line, scenario id, keyword) with one hit per
/// distinct (line, scenario, keyword) triple.
pub fn scan_snippet(snippet: &CodeSnippet, taxonomy: &Taxonomy) -> Vec<KeywordHit> {
    let mut hits = Vec::new();
    for (idx, line) in snippet.source.lines().enumerate() {
        let line_no = idx + 1;
        let kind = if is_import_line(line) {
            HitKind::ImportLine
        } else {
            HitKind::UsageLine
        };
        for scenario in &taxonomy.scenarios {
            for keyword in &scenario.artifacts {
                if contains_token(line, keyword) {
                    hits.push(KeywordHit {
                        line_no,
                        scenario_id: scenario.id.clone(),
                        matched_keyword: keyword.clone(),
                        kind,
                    });
                }
            }
        }
    }
    hits.sort();
    hits.dedup();
    hits
}

/// Map hits into the shared finding shape.
///
/// The description is synthesized as `<Category> -> <Summary>`, the
/// refactoring cell carries the scenario's target-version example verbatim,
/// and new-feature hits are marked optional. Hits citing ids absent from
/// the taxonomy are skipped.
pub fn hits_to_findings(hits: &[KeywordHit], taxonomy: &Taxonomy) -> Vec<MigrationFinding> {
    hits.iter()
        .filter_map(|hit| {
            let scenario = crate::taxonomy::scenario_by_id(taxonomy, &hit.scenario_id)?;
            Some(MigrationFinding {
                line_no: hit.line_no,
                code_text: String::new(),
                scenario_ref: ScenarioRef::Matched(scenario.id.clone()),
                scenario_description: format!(
                    "{} \u{2192} {}",
                    scenario.category.display_name(),
                    scenario.summary
                ),
                optional_flag: scenario.category == ScenarioCategory::NewFeature,
                artifact: hit.matched_keyword.clone(),
                refactoring: scenario.example_target.clone(),
            })
        })
        .collect()
}
