//! Parse the model's structured table output into typed findings.
//!
//! Models wrap their tables in prose; the parser locates the first
//! pipe-delimited table whose header matches the mode's column contract
//! (case-insensitive, whitespace-tolerant, order-exact) and ignores
//! everything around it.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipe_table;
use crate::prompting::PromptMode;
use crate::taxonomy::{scenario_by_id, Taxonomy};

/// Column contract when the taxonomy was provided.
pub const SIX_COLUMNS: [&str; 6] = [
    "Line",
    "Code",
    "Scenario ID",
    "Scenario",
    "Artifact",
    "Refactoring",
];
/// Column contract when the taxonomy was omitted.
pub const FIVE_COLUMNS: [&str; 5] = ["Line", "Code", "Scenario", "Artifact", "Refactoring"];

/// Grouped line ranges ("3-5") expand to one finding per line; ranges
/// longer than this are treated as malformed rather than expanded.
const MAX_RANGE_SPAN: usize = 1_000;

/// How one finding refers to the taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum ScenarioRef {
    /// A cited scenario id (with-taxonomy mode).
    Matched(String),
    /// The asterisk sentinel: the model saw an issue with no taxonomy match.
    NoMatch,
    /// Without-taxonomy mode: the output format has no id column.
    Unreferenced,
}

/// One parsed row of the model's output table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MigrationFinding {
    pub line_no: usize,
    pub code_text: String,
    pub scenario_ref: ScenarioRef,
    pub scenario_description: String,
    /// True when the raw Scenario cell carried the `(optional)` label
    /// (the label itself is stripped from `scenario_description`).
    pub optional_flag: bool,
    pub artifact: String,
    /// May be empty: the contract lets the model leave the cell blank.
    pub refactoring: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FindingsError {
    #[error("no structured table found in the response")]
    NoTableFound,
    #[error("table header {found:?} does not match the expected columns {expected:?}")]
    HeaderMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("table row {row}: expected {expected} cells, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("table row {row}: bad line number {cell:?}")]
    BadLineNumber { row: usize, cell: String },
}

fn expected_columns(mode: PromptMode) -> &'static [&'static str] {
    match mode {
        PromptMode::WithTaxonomy => &SIX_COLUMNS,
        PromptMode::WithoutTaxonomy => &FIVE_COLUMNS,
    }
}

fn header_matches(cells: &[String], expected: &[&str]) -> bool {
    cells.len() == expected.len()
        && cells
            .iter()
            .zip(expected)
            .all(|(cell, want)| pipe_table::trim_cell(cell).eq_ignore_ascii_case(want))
}

/// Parse arbitrary model output into findings.
///
/// Accepts any text; never panics. Surrounding prose is ignored: the
/// table starts at a header/separator pair and ends at the first blank or
/// pipe-free line. Escaped pipes and inline code fences inside cells are
/// unescaped. A Line cell of the form `N-M` (hyphen or en/em dash)
/// expands into one finding per line with identical remaining fields.
pub fn parse_findings(raw: &str, mode: PromptMode) -> Result<Vec<MigrationFinding>, FindingsError> {
    let expected = expected_columns(mode);
    let lines: Vec<&str> = raw
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();

    let mut first_candidate_header: Option<Vec<String>> = None;
    let mut i = 0;
    while i + 1 < lines.len() {
        if !lines[i].contains('|') || !pipe_table::is_separator_row(lines[i + 1]) {
            i += 1;
            continue;
        }
        let header: Vec<String> = pipe_table::split_row(lines[i])
            .iter()
            .map(|c| c.trim().to_string())
            .collect();
        if header.is_empty() {
            i += 1;
            continue;
        }
        if !header_matches(&header, expected) {
            first_candidate_header.get_or_insert(header);
            i += 1;
            continue;
        }
        return parse_data_rows(&lines[i + 2..], mode, expected.len());
    }

    match first_candidate_header {
        Some(found) => Err(FindingsError::HeaderMismatch {
            expected: expected.iter().map(|c| c.to_string()).collect(),
            found,
        }),
        None => Err(FindingsError::NoTableFound),
    }
}

fn parse_data_rows(
    lines: &[&str],
    mode: PromptMode,
    arity: usize,
) -> Result<Vec<MigrationFinding>, FindingsError> {
    let mut findings = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        if line.trim().is_empty() || !line.contains('|') {
            break;
        }
        let row = idx + 1;
        let cells = pipe_table::split_row(line);
        if cells.len() != arity {
            return Err(FindingsError::RowArity {
                row,
                expected: arity,
                found: cells.len(),
            });
        }
        let decoded: Vec<String> = cells
            .iter()
            .map(|c| {
                pipe_table::unescape_cell(pipe_table::strip_inline_fence(pipe_table::trim_cell(c)))
            })
            .collect();

        let line_range =
            parse_line_cell(&decoded[0]).ok_or_else(|| FindingsError::BadLineNumber {
                row,
                cell: decoded[0].clone(),
            })?;

        let (scenario_ref, scenario_cell, artifact, refactoring) = match mode {
            PromptMode::WithTaxonomy => (
                parse_scenario_ref(&decoded[2]),
                &decoded[3],
                &decoded[4],
                &decoded[5],
            ),
            PromptMode::WithoutTaxonomy => (
                ScenarioRef::Unreferenced,
                &decoded[2],
                &decoded[3],
                &decoded[4],
            ),
        };
        let (scenario_description, optional_flag) = extract_optional_label(scenario_cell);

        for line_no in line_range {
            findings.push(MigrationFinding {
                line_no,
                code_text: decoded[1].clone(),
                scenario_ref: scenario_ref.clone(),
                scenario_description: scenario_description.clone(),
                optional_flag,
                artifact: artifact.clone(),
                refactoring: refactoring.clone(),
            });
        }
    }
    Ok(findings)
}

fn parse_scenario_ref(cell: &str) -> ScenarioRef {
    let id = cell.trim();
    if id.is_empty() || id == "*" {
        ScenarioRef::NoMatch
    } else {
        ScenarioRef::Matched(id.to_string())
    }
}

fn parse_line_cell(cell: &str) -> Option<std::ops::RangeInclusive<usize>> {
    let text = cell.trim();
    if let Ok(single) = text.parse::<usize>() {
        return (single >= 1).then_some(single..=single);
    }
    let (start, end) = split_range(text)?;
    let start: usize = start.trim().parse().ok()?;
    let end: usize = end.trim().parse().ok()?;
    if start < 1 || end < start || end - start >= MAX_RANGE_SPAN {
        return None;
    }
    Some(start..=end)
}

fn split_range(text: &str) -> Option<(&str, &str)> {
    for dash in ['-', '\u{2013}', '\u{2014}'] {
        if let Some(pair) = text.split_once(dash) {
            return Some(pair);
        }
    }
    None
}

/// Strip every case-insensitive `(optional)` label, reporting whether one
/// was present. Whitespace around the removal point is collapsed.
fn extract_optional_label(cell: &str) -> (String, bool) {
    const LABEL: &str = "(optional)";
    let mut rest = cell;
    let mut pieces: Vec<&str> = Vec::new();
    let mut found = false;
    loop {
        match find_ascii_case_insensitive(rest, LABEL) {
            Some(pos) => {
                found = true;
                pieces.push(&rest[..pos]);
                rest = &rest[pos + LABEL.len()..];
            }
            None => {
                pieces.push(rest);
                break;
            }
        }
    }
    if !found {
        return (cell.trim().to_string(), false);
    }
    let joined = pieces.join(" ");
    let cleaned = joined.split_whitespace().collect::<Vec<_>>().join(" ");
    (cleaned, true)
}

fn find_ascii_case_insensitive(haystack: &str, needle: &str) -> Option<usize> {
    let haystack_bytes = haystack.as_bytes();
    let needle_bytes = needle.as_bytes();
    if needle_bytes.is_empty() || haystack_bytes.len() < needle_bytes.len() {
        return None;
    }
    (0..=haystack_bytes.len() - needle_bytes.len()).find(|&start| {
        haystack_bytes[start..start + needle_bytes.len()]
            .iter()
            .zip(needle_bytes)
            .all(|(a, b)| a.eq_ignore_ascii_case(b))
    })
}

/// Severity and kind of one [`resolve_findings`] diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolutionDiagnostic {
    /// A cited id does not exist in the taxonomy (hallucinated reference).
    UnknownScenarioId { line_no: usize, scenario_id: String },
    /// An asterisk row: a candidate gap in the taxonomy.
    TaxonomyGapCandidate { line_no: usize },
}

impl ResolutionDiagnostic {
    pub fn is_error(&self) -> bool {
        matches!(self, ResolutionDiagnostic::UnknownScenarioId { .. })
    }
}

impl fmt::Display for ResolutionDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolutionDiagnostic::UnknownScenarioId {
                line_no,
                scenario_id,
            } => write!(
                f,
                "line {line_no}: cited scenario {scenario_id:?} is not in the taxonomy"
            ),
            ResolutionDiagnostic::TaxonomyGapCandidate { line_no } => {
                write!(f, "line {line_no}: no-match marker; candidate taxonomy gap")
            }
        }
    }
}

/// Check with-taxonomy findings against the taxonomy.
///
/// One error diagnostic per cited id absent from the taxonomy; one
/// informational diagnostic per no-match (asterisk) finding.
pub fn resolve_findings(
    findings: &[MigrationFinding],
    taxonomy: &Taxonomy,
) -> Vec<ResolutionDiagnostic> {
    let mut diagnostics = Vec::new();
    for finding in findings {
        match &finding.scenario_ref {
            ScenarioRef::Matched(id) => {
                if scenario_by_id(taxonomy, id).is_none() {
                    diagnostics.push(ResolutionDiagnostic::UnknownScenarioId {
                        line_no: finding.line_no,
                        scenario_id: id.clone(),
                    });
                }
            }
            ScenarioRef::NoMatch => diagnostics.push(ResolutionDiagnostic::TaxonomyGapCandidate {
                line_no: finding.line_no,
            }),
            ScenarioRef::Unreferenced => {}
        }
    }
    diagnostics
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{MigrationFlow, MigrationScenario, ScenarioCategory, Taxonomy};

    fn six_col_output() -> String {
        [
            "I reviewed the code and found these issues:",
            "",
            "| Line | Code | Scenario ID | Scenario | Artifact | Refactoring |",
            "|------|------|-------------|----------|----------|-------------|",
            "| 2 | execute(qc, backend) | QSK-046-003 | Deprecation -> execute() deprecated | qiskit.execute | backend.run(...) |",
            "",
            "Let me know if you need more detail.",
        ]
        .join("\n")
    }

    #[test]
    fn parses_six_column_row() {
        let findings = parse_findings(&six_col_output(), PromptMode::WithTaxonomy).unwrap();
        assert_eq!(findings.len(), 1);
        let f = &findings[0];
        assert_eq!(f.line_no, 2);
        assert_eq!(f.code_text, "execute(qc, backend)");
        assert_eq!(
            f.scenario_ref,
            ScenarioRef::Matched("QSK-046-003".to_string())
        );
        assert_eq!(
            f.scenario_description,
            "Deprecation -> execute() deprecated"
        );
        assert!(!f.optional_flag);
        assert_eq!(f.artifact, "qiskit.execute");
        assert_eq!(f.refactoring, "backend.run(...)");
    }

    #[test]
    fn prose_only_output_has_no_table() {
        let err =
            parse_findings("No migration issues found.", PromptMode::WithTaxonomy).unwrap_err();
        assert_eq!(err, FindingsError::NoTableFound);
    }

    #[test]
    fn asterisk_cell_is_no_match() {
        let raw = "| Line | Code | Scenario ID | Scenario | Artifact | Refactoring |\n\
                   |---|---|---|---|---|---|\n\
                   | 4 | odd_call() | * | Deprecation -> unknown | odd_call | |";
        let findings = parse_findings(raw, PromptMode::WithTaxonomy).unwrap();
        assert_eq!(findings[0].scenario_ref, ScenarioRef::NoMatch);
        assert_eq!(findings[0].refactoring, "");
    }

    #[test]
    fn optional_label_is_extracted() {
        let raw = "| Line | Code | Scenario ID | Scenario | Artifact | Refactoring |\n\
                   |---|---|---|---|---|---|\n\
                   | 3 | sampler = Sampler() | QSK-046-030 | New feature (optional) -> primitives available | Sampler | |";
        let findings = parse_findings(raw, PromptMode::WithTaxonomy).unwrap();
        assert!(findings[0].optional_flag);
        assert_eq!(
            findings[0].scenario_description,
            "New feature -> primitives available"
        );
    }

    #[test]
    fn line_ranges_expand_per_line() {
        for dash in ["-", "\u{2013}"] {
            let raw = format!(
                "| Line | Code | Scenario | Artifact | Refactoring |\n\
                 |---|---|---|---|---|\n\
                 | 3{dash}5 | block | Deprecation -> grouped | thing | fix() |"
            );
            let findings = parse_findings(&raw, PromptMode::WithoutTaxonomy).unwrap();
            assert_eq!(
                findings.iter().map(|f| f.line_no).collect::<Vec<_>>(),
                vec![3, 4, 5],
                "dash {dash:?}"
            );
            assert!(findings
                .iter()
                .all(|f| f.scenario_ref == ScenarioRef::Unreferenced));
            assert!(findings.iter().all(|f| f.refactoring == "fix()"));
        }
    }

    #[test]
    fn five_column_mode_never_reads_ids() {
        let raw = "| Line | Code | Scenario | Artifact | Refactoring |\n\
                   |---|---|---|---|---|\n\
                   | 1 | import x | Deprecation -> x gone | x | import y |";
        let findings = parse_findings(raw, PromptMode::WithoutTaxonomy).unwrap();
        assert_eq!(findings[0].scenario_ref, ScenarioRef::Unreferenced);
    }

    #[test]
    fn wrong_header_is_a_mismatch() {
        let raw = "| Line | Snippet | Scenario | Artifact | Refactoring |\n\
                   |---|---|---|---|---|\n\
                   | 1 | x | y | z | w |";
        let err = parse_findings(raw, PromptMode::WithoutTaxonomy).unwrap_err();
        assert!(matches!(err, FindingsError::HeaderMismatch { .. }));
    }

    #[test]
    fn six_column_table_in_five_column_mode_is_a_mismatch() {
        let err = parse_findings(&six_col_output(), PromptMode::WithoutTaxonomy).unwrap_err();
        assert!(matches!(err, FindingsError::HeaderMismatch { .. }));
    }

    #[test]
    fn row_arity_is_checked() {
        let raw = "| Line | Code | Scenario | Artifact | Refactoring |\n\
                   |---|---|---|---|---|\n\
                   | 1 | x | y | z |";
        let err = parse_findings(raw, PromptMode::WithoutTaxonomy).unwrap_err();
        assert_eq!(
            err,
            FindingsError::RowArity {
                row: 1,
                expected: 5,
                found: 4
            }
        );
    }

    #[test]
    fn bad_line_numbers_are_rejected() {
        for cell in ["zero", "0", "4-2", "1-99999999", "-3", ""] {
            let raw = format!(
                "| Line | Code | Scenario | Artifact | Refactoring |\n\
                 |---|---|---|---|---|\n\
                 | {cell} | x | y | z | w |"
            );
            let err = parse_findings(&raw, PromptMode::WithoutTaxonomy).unwrap_err();
            assert!(
                matches!(err, FindingsError::BadLineNumber { row: 1, .. }),
                "cell {cell:?} gave {err:?}"
            );
        }
    }

    #[test]
    fn prose_with_pipes_does_not_confuse_the_scan() {
        let raw = "some | stray pipes here\n".to_string() + &six_col_output();
        let findings = parse_findings(&raw, PromptMode::WithTaxonomy).unwrap();
        assert_eq!(findings.len(), 1);
    }

    #[test]
    fn first_matching_table_wins() {
        let raw = "| Wrong | Header |\n|---|---|\n| a | b |\n\n".to_string()
            + &six_col_output()
            + "\n\n| Line | Code | Scenario ID | Scenario | Artifact | Refactoring |\n|---|---|---|---|---|---|\n| 9 | other | * | x | y | z |";
        let findings = parse_findings(&raw, PromptMode::WithTaxonomy).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].line_no, 2);
    }

    #[test]
    fn escaped_pipes_and_fences_are_unescaped() {
        let raw = "| Line | Code | Scenario | Artifact | Refactoring |\n\
                   |---|---|---|---|---|\n\
                   | 7 | `print(a \\| b)` | Structural change -> ops | print | `print(a \\| b, sep='')` |";
        let findings = parse_findings(raw, PromptMode::WithoutTaxonomy).unwrap();
        assert_eq!(findings[0].code_text, "print(a | b)");
        assert_eq!(findings[0].refactoring, "print(a | b, sep='')");
    }

    #[test]
    fn row_count_is_conserved() {
        let mut raw = String::from(
            "| Line | Code | Scenario | Artifact | Refactoring |\n|---|---|---|---|---|\n",
        );
        for i in 1..=7 {
            raw.push_str(&format!("| {i} | code{i} | desc | art | fix |\n"));
        }
        let findings = parse_findings(&raw, PromptMode::WithoutTaxonomy).unwrap();
        assert_eq!(findings.len(), 7);
    }

    #[test]
    fn header_matching_is_case_insensitive() {
        let raw = "| line | CODE | scenario id | Scenario | ARTIFACT | refactoring |\n\
                   |---|---|---|---|---|---|\n\
                   | 1 | x | QSK-046-001 | d | a | r |";
        let findings = parse_findings(raw, PromptMode::WithTaxonomy).unwrap();
        assert_eq!(findings.len(), 1);
    }

    fn tiny_taxonomy() -> Taxonomy {
        Taxonomy::new(
            "0.46".parse().unwrap(),
            vec![MigrationScenario {
                id: "QSK-046-001".to_string(),
                category: ScenarioCategory::Deprecation,
                flow: MigrationFlow {
                    source_version: "0.45".parse().unwrap(),
                    target_version: "0.46".parse().unwrap(),
                },
                summary: "execute() deprecated".to_string(),
                artifacts: vec!["execute".to_string()],
                example_source: "execute(qc, backend)".to_string(),
                example_target: "backend.run(qc)".to_string(),
                difficulty: None,
                impact: None,
                references: Vec::new(),
            }],
        )
    }

    fn finding(scenario_ref: ScenarioRef) -> MigrationFinding {
        MigrationFinding {
            line_no: 1,
            code_text: "x".to_string(),
            scenario_ref,
            scenario_description: "d".to_string(),
            optional_flag: false,
            artifact: "a".to_string(),
            refactoring: "r".to_string(),
        }
    }

    #[test]
    fn resolve_passes_known_ids() {
        let findings = vec![finding(ScenarioRef::Matched("QSK-046-001".to_string()))];
        assert!(resolve_findings(&findings, &tiny_taxonomy()).is_empty());
    }

    #[test]
    fn resolve_flags_unknown_ids() {
        let findings = vec![finding(ScenarioRef::Matched("QSK-046-999".to_string()))];
        let diagnostics = resolve_findings(&findings, &tiny_taxonomy());
        assert_eq!(diagnostics.len(), 1);
        assert!(diagnostics[0].is_error());
    }

    #[test]
    fn resolve_reports_gap_candidates_as_info() {
        let findings = vec![finding(ScenarioRef::NoMatch)];
        let diagnostics = resolve_findings(&findings, &tiny_taxonomy());
        assert_eq!(
            diagnostics,
            vec![ResolutionDiagnostic::TaxonomyGapCandidate { line_no: 1 }]
        );
        assert!(!diagnostics[0].is_error());
    }

    #[test]
    fn arbitrary_junk_never_panics() {
        for raw in [
            "",
            "|",
            "||",
            "|||\n|---|\n|x|",
            "\\",
            "| Line |\n|---|\n",
            "| Line | Code | Scenario | Artifact | Refactoring |",
            "|---|---|---|---|---|",
        ] {
            let _ = parse_findings(raw, PromptMode::WithTaxonomy);
            let _ = parse_findings(raw, PromptMode::WithoutTaxonomy);
        }
    }
}
