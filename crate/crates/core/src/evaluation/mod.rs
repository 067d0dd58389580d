//! Rubric grading, confusion counts, and derived metrics.
//!
//! Findings are graded per line against the ground truth (with optional
//! manual overrides), then aggregated at two levels: per snippet (scenario
//! identification) and per line (refactoring suggestions). OK and OK-
//! grades count as correct; X+ and X count as false positives.

pub mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::GroundTruth;
use crate::pipe_table;
use crate::response_parser::MigrationFinding;

/// The four-tier review rubric, ordered `OK > OK- > X+ > X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RubricGrade {
    /// X: incorrect or misleading suggestion.
    Incorrect,
    /// X+: valid code but not aligned with the target version or context.
    WrongVersion,
    /// OK-: minor issues, easily fixed on inspection.
    OkMinor,
    /// OK: correct suggestion.
    Ok,
}

impl RubricGrade {
    /// Short token as written in override files: `OK`, `OK-`, `X+`, `X`.
    pub fn token(&self) -> &'static str {
        match self {
            RubricGrade::Ok => "OK",
            RubricGrade::OkMinor => "OK-",
            RubricGrade::WrongVersion => "X+",
            RubricGrade::Incorrect => "X",
        }
    }

    pub fn parse_token(token: &str) -> Option<RubricGrade> {
        match token.trim() {
            "OK" => Some(RubricGrade::Ok),
            "OK-" => Some(RubricGrade::OkMinor),
            "X+" => Some(RubricGrade::WrongVersion),
            "X" => Some(RubricGrade::Incorrect),
            _ => None,
        }
    }

    /// Grades that count as correct suggestions.
    pub fn is_correct(&self) -> bool {
        *self >= RubricGrade::OkMinor
    }
}

impl fmt::Display for RubricGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradeSource {
    Auto,
    ManualOverride,
}

/// One finding with its rubric grade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedFinding {
    pub finding: MigrationFinding,
    pub grade: RubricGrade,
    pub grade_source: GradeSource,
}

/// Manual review results keyed by `(snippet_id, line_no)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OverrideSet {
    entries: BTreeMap<(String, usize), RubricGrade>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("override file line {line_index}: {reason}")]
    MalformedOverride { line_index: usize, reason: String },
    #[error("override for {snippet_id} line {line_no} matches no finding")]
    OverrideKeyUnknown { snippet_id: String, line_no: usize },
}

impl OverrideSet {
    /// Parse the line-oriented override file format:
    /// `override: <snippet_id> | <line_no> | OK|OK-|X+|X`.
    pub fn parse(text: &str) -> Result<OverrideSet, EvalError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.split('\n').enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let line_index = i + 1;
            let malformed = |reason: &str| EvalError::MalformedOverride {
                line_index,
                reason: reason.to_string(),
            };
            let record = line
                .strip_prefix("override:")
                .ok_or_else(|| malformed("expected an \"override:\" record"))?;
            let fields = pipe_table::split_fields(record);
            if fields.len() != 3 {
                return Err(malformed(&format!(
                    "expected 3 pipe-separated fields, found {}",
                    fields.len()
                )));
            }
            let snippet_id = fields[0].trim().to_string();
            if snippet_id.is_empty() {
                return Err(malformed("empty snippet id"));
            }
            let line_no: usize = fields[1]
                .trim()
                .parse()
                .map_err(|_| malformed("line number is not a positive integer"))?;
            let grade = RubricGrade::parse_token(&fields[2])
                .ok_or_else(|| malformed("grade must be one of OK, OK-, X+, X"))?;
            entries.insert((snippet_id, line_no), grade);
        }
        Ok(OverrideSet { entries })
    }

    pub fn get(&self, snippet_id: &str, line_no: usize) -> Option<RubricGrade> {
        self.entries
            .get(&(snippet_id.to_string(), line_no))
            .copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All keys, for cross-checking that every override was applied.
    pub fn keys(&self) -> impl Iterator<Item = (&str, usize)> {
        self.entries
            .iter()
            .map(|((id, line), _)| (id.as_str(), *line))
    }
}

/// Collapse whitespace runs and trim; grading ignores formatting-only
/// differences.
fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, PartialEq, Eq, Clone)]
enum CodeToken {
    Ident(String),
    Other(String),
}

fn tokenize_code(text: &str) -> Vec<CodeToken> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(CodeToken::Ident(ident));
        } else {
            let mut other = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphabetic() || c == '_' {
                    break;
                }
                other.push(c);
                chars.next();
            }
            tokens.push(CodeToken::Other(other));
        }
    }
    tokens
}

/// Whether two code fragments are equal modulo a consistent one-to-one
/// renaming of identifiers (numbers, operators and punctuation must match
/// exactly).
fn renaming_unifiable(left: &str, right: &str) -> bool {
    let left_tokens = tokenize_code(left);
    let right_tokens = tokenize_code(right);
    if left_tokens.len() != right_tokens.len() {
        return false;
    }
    let mut forward: BTreeMap<&str, &str> = BTreeMap::new();
    let mut backward: BTreeMap<&str, &str> = BTreeMap::new();
    for (l, r) in left_tokens.iter().zip(&right_tokens) {
        match (l, r) {
            (CodeToken::Other(a), CodeToken::Other(b)) => {
                if a != b {
                    return false;
                }
            }
            (CodeToken::Ident(a), CodeToken::Ident(b)) => {
                if *forward.entry(a).or_insert(b) != b || *backward.entry(b).or_insert(a) != a {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

fn auto_grade(finding: &MigrationFinding, truth: &GroundTruth) -> RubricGrade {
    let on_line: Vec<_> = truth
        .changes
        .iter()
        .filter(|c| c.line_no == finding.line_no)
        .collect();
    if on_line.is_empty() {
        return RubricGrade::Incorrect;
    }
    let suggested = normalize_ws(&finding.refactoring);
    let mut best = RubricGrade::WrongVersion;
    for change in on_line {
        let expected = normalize_ws(&change.expected_refactoring);
        if suggested == expected {
            return RubricGrade::Ok;
        }
        if renaming_unifiable(&suggested, &expected) {
            best = RubricGrade::OkMinor;
        }
    }
    best
}

/// Grade findings for one snippet.
///
/// An override keyed to this snippet takes precedence over the auto grade;
/// an override whose line matches no finding is an error.
pub fn grade_findings(
    findings: &[MigrationFinding],
    truth: &GroundTruth,
    overrides: Option<&OverrideSet>,
) -> Result<Vec<GradedFinding>, EvalError> {
    let (graded, consumed) = grade_findings_tracking(findings, truth, overrides);
    if let Some(overrides) = overrides {
        for (snippet_id, line_no) in overrides.keys() {
            if snippet_id == truth.snippet_id && !consumed.contains(&line_no) {
                return Err(EvalError::OverrideKeyUnknown {
                    snippet_id: snippet_id.to_string(),
                    line_no,
                });
            }
        }
    }
    Ok(graded)
}

/// Grading without the unknown-key check, reporting which override lines
/// were consumed. Callers scoring several runs against one override file
/// use this and cross-check key consumption themselves.
pub fn grade_findings_tracking(
    findings: &[MigrationFinding],
    truth: &GroundTruth,
    overrides: Option<&OverrideSet>,
) -> (Vec<GradedFinding>, BTreeSet<usize>) {
    let mut consumed = BTreeSet::new();
    let graded = findings
        .iter()
        .map(
            |finding| match overrides.and_then(|o| o.get(&truth.snippet_id, finding.line_no)) {
                Some(grade) => {
                    consumed.insert(finding.line_no);
                    GradedFinding {
                        finding: finding.clone(),
                        grade,
                        grade_source: GradeSource::ManualOverride,
                    }
                }
                None => GradedFinding {
                    finding: finding.clone(),
                    grade: auto_grade(finding, truth),
                    grade_source: GradeSource::Auto,
                },
            },
        )
        .collect();
    (graded, consumed)
}

/// Confusion-matrix counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionCounts { tp, fp, fn_, tn }
    }
}

/// Per-snippet scenario-identification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioOutcome {
    TruePositive,
    FalsePositive,
    FalseNegative,
    TrueNegative,
}

impl ScenarioOutcome {
    pub fn token(&self) -> &'static str {
        match self {
            ScenarioOutcome::TruePositive => "tp",
            ScenarioOutcome::FalsePositive => "fp",
            ScenarioOutcome::FalseNegative => "fn",
            ScenarioOutcome::TrueNegative => "tn",
        }
    }
}

/// Classify one snippet.
///
/// TP: needed refactoring and at least one correct finding sits on an
/// expected line. FN: needed refactoring and no finding touched any
/// expected line. FP: engaged with expected lines but never correctly, or
/// flagged a clean snippet. TN: clean snippet left alone.
pub fn scenario_outcome(truth: &GroundTruth, graded: &[GradedFinding]) -> ScenarioOutcome {
    let expected_lines: BTreeSet<usize> = truth.changes.iter().map(|c| c.line_no).collect();
    if truth.needs_refactoring {
        let has_correct_hit = graded
            .iter()
            .any(|g| g.grade.is_correct() && expected_lines.contains(&g.finding.line_no));
        if has_correct_hit {
            ScenarioOutcome::TruePositive
        } else if graded
            .iter()
            .all(|g| !expected_lines.contains(&g.finding.line_no))
        {
            ScenarioOutcome::FalseNegative
        } else {
            ScenarioOutcome::FalsePositive
        }
    } else if graded.is_empty() {
        ScenarioOutcome::TrueNegative
    } else {
        ScenarioOutcome::FalsePositive
    }
}

/// Scenario-level confusion counts over all snippets.
pub fn score_scenarios(results: &[(GroundTruth, Vec<GradedFinding>)]) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for (truth, graded) in results {
        match scenario_outcome(truth, graded) {
            ScenarioOutcome::TruePositive => counts.tp += 1,
            ScenarioOutcome::FalsePositive => counts.fp += 1,
            ScenarioOutcome::FalseNegative => counts.fn_ += 1,
            ScenarioOutcome::TrueNegative => counts.tn += 1,
        }
    }
    counts
}

/// Line-level confusion counts.
///
/// Per expected change: TP when some correct finding sits on its line, FN
/// otherwise. Per finding: FP when it sits on a non-expected line or was
/// graded X+/X on an expected line. TN is 0 by convention (clean lines are
/// not enumerated).
pub fn score_lines(results: &[(GroundTruth, Vec<GradedFinding>)]) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for (truth, graded) in results {
        let expected_lines: BTreeSet<usize> = truth.changes.iter().map(|c| c.line_no).collect();
        for change in &truth.changes {
            let hit = graded
                .iter()
                .any(|g| g.finding.line_no == change.line_no && g.grade.is_correct());
            if hit {
                counts.tp += 1;
            } else {
                counts.fn_ += 1;
            }
        }
        for g in graded {
            if !expected_lines.contains(&g.finding.line_no) || !g.grade.is_correct() {
                counts.fp += 1;
            }
        }
    }
    counts
}

/// `tp / (tp + fp)`; undefined (`None`) when nothing was flagged.
pub fn precision(counts: &ConfusionCounts) -> Option<f64> {
    let denominator = counts.tp + counts.fp;
    (denominator > 0).then(|| counts.tp as f64 / denominator as f64)
}

/// `tp / (tp + fn)`; undefined (`None`) when nothing was expected.
pub fn recall(counts: &ConfusionCounts) -> Option<f64> {
    let denominator = counts.tp + counts.fn_;
    (denominator > 0).then(|| counts.tp as f64 / denominator as f64)
}

/// Missed changes over total expected changes; undefined when nothing was
/// expected.
pub fn missed_ratio(missed: u64, total_expected: u64) -> Option<f64> {
    (total_expected > 0).then(|| missed as f64 / total_expected as f64)
}
