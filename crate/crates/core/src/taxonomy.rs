//! The migration-scenario taxonomy: data model, table-file parser,
//! serializer, and validator.
//!
//! A taxonomy file is a UTF-8 pipe-delimited table with one scenario per
//! data row. The header carries ten fixed, case-sensitive column names
//! (see [`TAXONOMY_COLUMNS`]). Multi-line cell content is encoded with the
//! escapes from [`crate::pipe_table`]; code cells may additionally be
//! wrapped in inline backtick fences, which the parser strips.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipe_table;
use crate::version::VersionNumber;

/// The ten required header cells, in order. `Id` is tool-assigned; the
/// remaining nine describe the scenario.
pub const TAXONOMY_COLUMNS: [&str; 10] = [
    "Id",
    "Category",
    "Migration Flow",
    "Summary",
    "Artifacts",
    "Example code in source version",
    "Example code in target version",
    "Degree of Difficulty",
    "Degree of impact in SE/QSE",
    "References",
];

/// Kind of change a scenario describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioCategory {
    Deprecation,
    NewFeature,
    StructuralChange,
}

impl ScenarioCategory {
    /// Canonical display name as written in taxonomy files and synthesized
    /// scenario descriptions.
    pub fn display_name(&self) -> &'static str {
        match self {
            ScenarioCategory::Deprecation => "Deprecation",
            ScenarioCategory::NewFeature => "New feature",
            ScenarioCategory::StructuralChange => "Structural change",
        }
    }

    /// Parse a category cell. Matching is case-insensitive on the three
    /// canonical names; anything else is rejected.
    pub fn parse(text: &str) -> Option<ScenarioCategory> {
        let folded = text.trim().to_ascii_lowercase();
        match folded.as_str() {
            "deprecation" => Some(ScenarioCategory::Deprecation),
            "new feature" => Some(ScenarioCategory::NewFeature),
            "structural change" => Some(ScenarioCategory::StructuralChange),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Source and target of the version upgrade a scenario belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationFlow {
    pub source_version: VersionNumber,
    pub target_version: VersionNumber,
}

impl MigrationFlow {
    /// Whether the flow moves forward (`source < target`). Flows are
    /// representable either way; [`validate_taxonomy`] diagnoses
    /// violations rather than making them unconstructible.
    pub fn is_ordered(&self) -> bool {
        self.source_version < self.target_version
    }
}

impl fmt::Display for MigrationFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source_version, self.target_version)
    }
}

/// One taxonomy row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationScenario {
    pub id: String,
    pub category: ScenarioCategory,
    pub flow: MigrationFlow,
    pub summary: String,
    /// Keywords naming the affected modules/classes/functions/parameters.
    pub artifacts: Vec<String>,
    pub example_source: String,
    pub example_target: String,
    /// Free text, preserved verbatim; drives no logic.
    pub difficulty: Option<String>,
    /// Free text, preserved verbatim; drives no logic.
    pub impact: Option<String>,
    pub references: Vec<String>,
}

/// An ordered set of scenarios for one target version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub target_version: VersionNumber,
    pub scenarios: Vec<MigrationScenario>,
}

impl Taxonomy {
    pub fn new(target_version: VersionNumber, scenarios: Vec<MigrationScenario>) -> Self {
        Taxonomy {
            target_version,
            scenarios,
        }
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Scenario counts: (total, deprecations, new features, structural).
    pub fn category_census(&self) -> (usize, usize, usize, usize) {
        let mut dep = 0;
        let mut new = 0;
        let mut structural = 0;
        for s in &self.scenarios {
            match s.category {
                ScenarioCategory::Deprecation => dep += 1,
                ScenarioCategory::NewFeature => new += 1,
                ScenarioCategory::StructuralChange => structural += 1,
            }
        }
        (self.scenarios.len(), dep, new, structural)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("missing required column {0:?} in header row")]
    MissingColumn(String),
    #[error("unexpected extra column {0:?} in header row")]
    UnexpectedColumn(String),
    #[error("header row is not followed by a separator row")]
    MissingSeparator,
    #[error("no header row found")]
    MissingHeader,
    #[error("row {row}: expected {expected} cells, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate scenario id {0:?}")]
    DuplicateId(String),
    #[error("unknown category {0:?} (expected Deprecation, New feature, or Structural change)")]
    UnknownCategory(String),
    #[error("row {row}: required cell {column:?} is empty")]
    EmptyRequiredCell { row: usize, column: &'static str },
    #[error("row {row}: invalid migration flow {cell:?} (expected \"<source> -> <target>\")")]
    InvalidFlow { row: usize, cell: String },
}

fn decode_cell(raw: &str) -> String {
    pipe_table::unescape_cell(pipe_table::trim_cell(raw))
}

fn decode_code_cell(raw: &str) -> String {
    pipe_table::unescape_cell(pipe_table::strip_inline_fence(pipe_table::trim_cell(raw)))
}

/// Parse a taxonomy file.
///
/// The taxonomy's `target_version` is derived as the maximum target
/// version named by any scenario flow; an empty table yields version `0`.
/// Flow direction and reference syntax are deliberately *not* rejected
/// here; [`validate_taxonomy`] reports them as diagnostics.
pub fn parse_taxonomy(text: &str) -> Result<Taxonomy, TaxonomyError> {
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty());

    let header_line = lines.next().ok_or(TaxonomyError::MissingHeader)?;
    let header: Vec<String> = pipe_table::split_row(header_line)
        .iter()
        .map(|c| c.trim().to_string())
        .collect();
    for (idx, expected) in TAXONOMY_COLUMNS.iter().enumerate() {
        match header.get(idx) {
            Some(found) if found == expected => {}
            _ => return Err(TaxonomyError::MissingColumn((*expected).to_string())),
        }
    }
    if header.len() > TAXONOMY_COLUMNS.len() {
        return Err(TaxonomyError::UnexpectedColumn(
            header[TAXONOMY_COLUMNS.len()].clone(),
        ));
    }

    let separator = lines.next().ok_or(TaxonomyError::MissingSeparator)?;
    if !pipe_table::is_separator_row(separator) {
        return Err(TaxonomyError::MissingSeparator);
    }

    let mut scenarios = Vec::new();
    let mut seen_ids = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let cells = pipe_table::split_row(line);
        if cells.len() != TAXONOMY_COLUMNS.len() {
            return Err(TaxonomyError::RowArity {
                row,
                expected: TAXONOMY_COLUMNS.len(),
                found: cells.len(),
            });
        }

        let require = |idx: usize, column: &'static str| -> Result<String, TaxonomyError> {
            let value = decode_cell(&cells[idx]);
            if value.is_empty() {
                Err(TaxonomyError::EmptyRequiredCell { row, column })
            } else {
                Ok(value)
            }
        };

        let id = require(0, "Id")?;
        if seen_ids.insert(id.clone(), row).is_some() {
            return Err(TaxonomyError::DuplicateId(id));
        }

        let category_text = require(1, "Category")?;
        let category = ScenarioCategory::parse(&category_text)
            .ok_or(TaxonomyError::UnknownCategory(category_text))?;

        let flow_text = require(2, "Migration Flow")?;
        let flow = parse_flow(&flow_text).ok_or_else(|| TaxonomyError::InvalidFlow {
            row,
            cell: flow_text.clone(),
        })?;

        let summary = require(3, "Summary")?;

        let artifacts: Vec<String> = require(4, "Artifacts")?
            .split(',')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        if artifacts.is_empty() {
            return Err(TaxonomyError::EmptyRequiredCell {
                row,
                column: "Artifacts",
            });
        }

        let example_source = decode_code_cell(&cells[5]);
        if example_source.is_empty() {
            return Err(TaxonomyError::EmptyRequiredCell {
                row,
                column: "Example code in source version",
            });
        }
        let example_target = decode_code_cell(&cells[6]);
        if example_target.is_empty() {
            return Err(TaxonomyError::EmptyRequiredCell {
                row,
                column: "Example code in target version",
            });
        }

        let difficulty = non_empty(decode_cell(&cells[7]));
        let impact = non_empty(decode_cell(&cells[8]));
        let references: Vec<String> = decode_cell(&cells[9])
            .split(',')
            .map(|r| r.trim().to_string())
            .filter(|r| !r.is_empty())
            .collect();

        scenarios.push(MigrationScenario {
            id,
            category,
            flow,
            summary,
            artifacts,
            example_source,
            example_target,
            difficulty,
            impact,
            references,
        });
    }

    let target_version = scenarios
        .iter()
        .map(|s| s.flow.target_version.clone())
        .max()
        .unwrap_or_else(VersionNumber::zero);

    Ok(Taxonomy::new(target_version, scenarios))
}

fn non_empty(value: String) -> Option<String> {
    if value.is_empty() {
        None
    } else {
        Some(value)
    }
}

fn parse_flow(text: &str) -> Option<MigrationFlow> {
    let (source, target) = text.split_once("->")?;
    Some(MigrationFlow {
        source_version: source.trim().parse().ok()?,
        target_version: target.trim().parse().ok()?,
    })
}

/// Serialize a taxonomy to its table-file text.
///
/// Output is byte-stable: serializing the same value twice yields
/// identical text, and `parse_taxonomy` reads every field back.
pub fn serialize_taxonomy(taxonomy: &Taxonomy) -> String {
    let mut out = String::new();
    let header: Vec<String> = TAXONOMY_COLUMNS.iter().map(|c| c.to_string()).collect();
    out.push_str(&pipe_table::join_row(&header));
    out.push('\n');
    out.push_str("|---|---|---|---|---|---|---|---|---|---|");
    out.push('\n');
    for s in &taxonomy.scenarios {
        let cells = vec![
            pipe_table::escape_cell(&s.id, false),
            pipe_table::escape_cell(s.category.display_name(), false),
            pipe_table::escape_cell(&s.flow.to_string(), false),
            pipe_table::escape_cell(&s.summary, false),
            pipe_table::escape_cell(&s.artifacts.join(", "), false),
            pipe_table::escape_cell(&s.example_source, true),
            pipe_table::escape_cell(&s.example_target, true),
            pipe_table::escape_cell(s.difficulty.as_deref().unwrap_or(""), false),
            pipe_table::escape_cell(s.impact.as_deref().unwrap_or(""), false),
            pipe_table::escape_cell(&s.references.join(", "), false),
        ];
        out.push_str(&pipe_table::join_row(&cells));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
            Severity::Info => f.write_str("info"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    DuplicateId,
    EmptyId,
    ReservedId,
    EmptyArtifacts,
    EmptyExample,
    VersionOrder,
    TargetVersionExceeded,
    SuspectReference,
    CategoryCensus,
}

/// One finding from [`validate_taxonomy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    fn error(kind: DiagnosticKind, message: String) -> Self {
        Diagnostic {
            severity: Severity::Error,
            kind,
            message,
        }
    }

    fn warning(kind: DiagnosticKind, message: String) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            kind,
            message,
        }
    }
}

/// Whether a diagnostic list contains any error-severity entries.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}

/// Check every taxonomy invariant, returning one diagnostic per violation
/// plus an informational category census. Reference URLs are checked
/// syntactically only.
pub fn validate_taxonomy(taxonomy: &Taxonomy) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    let mut seen = BTreeMap::new();
    for s in &taxonomy.scenarios {
        if s.id.is_empty() {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::EmptyId,
                "scenario with empty id".to_string(),
            ));
        } else if s.id == "*" {
            diagnostics.push(Diagnostic::warning(
                DiagnosticKind::ReservedId,
                "scenario id \"*\" collides with the no-match sentinel".to_string(),
            ));
        }
        if seen.insert(s.id.clone(), ()).is_some() {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::DuplicateId,
                format!("duplicate scenario id {:?}", s.id),
            ));
        }
        if s.artifacts.is_empty() {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::EmptyArtifacts,
                format!("scenario {}: no artifacts listed", s.id),
            ));
        }
        if s.example_source.is_empty() {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::EmptyExample,
                format!("scenario {}: empty source-version example", s.id),
            ));
        }
        if s.example_target.is_empty() {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::EmptyExample,
                format!("scenario {}: empty target-version example", s.id),
            ));
        }
        if !s.flow.is_ordered() {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::VersionOrder,
                format!(
                    "scenario {}: migration flow {} does not move forward",
                    s.id, s.flow
                ),
            ));
        }
        if s.flow.target_version > taxonomy.target_version {
            diagnostics.push(Diagnostic::error(
                DiagnosticKind::TargetVersionExceeded,
                format!(
                    "scenario {}: flow target {} exceeds taxonomy target {}",
                    s.id, s.flow.target_version, taxonomy.target_version
                ),
            ));
        }
        for url in &s.references {
            if !looks_like_url(url) {
                diagnostics.push(Diagnostic::warning(
                    DiagnosticKind::SuspectReference,
                    format!(
                        "scenario {}: reference {:?} is not an http(s) URL",
                        s.id, url
                    ),
                ));
            }
        }
    }

    let (total, dep, new, structural) = taxonomy.category_census();
    diagnostics.push(Diagnostic {
        severity: Severity::Info,
        kind: DiagnosticKind::CategoryCensus,
        message: format!(
            "scenarios: {total} (deprecation {dep}, new-feature {new}, structural {structural})"
        ),
    });
    diagnostics
}

fn looks_like_url(url: &str) -> bool {
    let rest = url
        .strip_prefix("https://")
        .or_else(|| url.strip_prefix("http://"));
    matches!(rest, Some(tail) if !tail.is_empty() && !tail.contains(char::is_whitespace))
}

/// Look up a scenario by id. The asterisk sentinel is never a stored id
/// and always resolves to `None`.
pub fn scenario_by_id<'a>(taxonomy: &'a Taxonomy, id: &str) -> Option<&'a MigrationScenario> {
    if id == "*" {
        return None;
    }
    taxonomy.scenarios.iter().find(|s| s.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scenario(id: &str, category: ScenarioCategory) -> MigrationScenario {
        MigrationScenario {
            id: id.to_string(),
            category,
            flow: MigrationFlow {
                source_version: "0.45".parse().unwrap(),
                target_version: "0.46".parse().unwrap(),
            },
            summary: "execute() removed from the top-level module".to_string(),
            artifacts: vec!["execute".to_string()],
            example_source: "from qiskit import execute\njob = execute(qc, backend)".to_string(),
            example_target: "job = backend.run(qc)".to_string(),
            difficulty: Some("Low".to_string()),
            impact: None,
            references: vec!["https://example.org/notes".to_string()],
        }
    }

    fn small_taxonomy() -> Taxonomy {
        Taxonomy::new(
            "0.46".parse().unwrap(),
            vec![
                scenario("QSK-046-001", ScenarioCategory::Deprecation),
                scenario("QSK-046-002", ScenarioCategory::NewFeature),
            ],
        )
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let taxonomy = small_taxonomy();
        let text = serialize_taxonomy(&taxonomy);
        let parsed = parse_taxonomy(&text).unwrap();
        assert_eq!(parsed, taxonomy);
    }

    #[test]
    fn serialization_is_byte_stable() {
        let taxonomy = small_taxonomy();
        assert_eq!(serialize_taxonomy(&taxonomy), serialize_taxonomy(&taxonomy));
    }

    #[test]
    fn empty_taxonomy_serializes_to_header_and_separator_only() {
        let taxonomy = Taxonomy::new(VersionNumber::zero(), Vec::new());
        let text = serialize_taxonomy(&taxonomy);
        assert_eq!(text.lines().count(), 2);
        let parsed = parse_taxonomy(&text).unwrap();
        assert!(parsed.is_empty());
        assert_eq!(parsed.target_version, VersionNumber::zero());
    }

    #[test]
    fn unknown_category_is_rejected() {
        let mut taxonomy = small_taxonomy();
        taxonomy.scenarios.truncate(1);
        let text = serialize_taxonomy(&taxonomy).replace("Deprecation", "Removal");
        assert_eq!(
            parse_taxonomy(&text),
            Err(TaxonomyError::UnknownCategory("Removal".to_string()))
        );
    }

    #[test]
    fn category_strings_cover_exactly_three_variants() {
        assert_eq!(
            ScenarioCategory::parse("Deprecation"),
            Some(ScenarioCategory::Deprecation)
        );
        assert_eq!(
            ScenarioCategory::parse("new feature"),
            Some(ScenarioCategory::NewFeature)
        );
        assert_eq!(
            ScenarioCategory::parse(" Structural change "),
            Some(ScenarioCategory::StructuralChange)
        );
        for bad in ["Removal", "Deprecated", "Feature", "", "*"] {
            assert_eq!(ScenarioCategory::parse(bad), None, "{bad:?} must not parse");
        }
    }

    #[test]
    fn duplicate_ids_are_a_parse_error() {
        let mut taxonomy = small_taxonomy();
        taxonomy.scenarios[1].id = "QSK-046-001".to_string();
        let text = serialize_taxonomy(&taxonomy);
        assert_eq!(
            parse_taxonomy(&text),
            Err(TaxonomyError::DuplicateId("QSK-046-001".to_string()))
        );
    }

    #[test]
    fn missing_column_is_reported_by_name() {
        let text = "| Id | Category |\n|---|---|\n";
        assert_eq!(
            parse_taxonomy(text),
            Err(TaxonomyError::MissingColumn("Migration Flow".to_string()))
        );
    }

    #[test]
    fn empty_required_cell_is_reported_with_row_and_column() {
        let mut taxonomy = small_taxonomy();
        taxonomy.scenarios.truncate(1);
        let text = serialize_taxonomy(&taxonomy)
            .replace("execute() removed from the top-level module", "");
        assert_eq!(
            parse_taxonomy(&text),
            Err(TaxonomyError::EmptyRequiredCell {
                row: 1,
                column: "Summary"
            })
        );
    }

    #[test]
    fn delimiter_in_summary_round_trips() {
        let mut taxonomy = small_taxonomy();
        taxonomy.scenarios[0].summary = "uses a | pipe and a \\ backslash".to_string();
        let text = serialize_taxonomy(&taxonomy);
        let parsed = parse_taxonomy(&text).unwrap();
        assert_eq!(parsed, taxonomy);
    }

    #[test]
    fn validate_flags_duplicates_and_version_order() {
        let mut taxonomy = small_taxonomy();
        taxonomy.scenarios[1].id = "QSK-046-001".to_string();
        taxonomy.scenarios[1].flow = MigrationFlow {
            source_version: "0.46".parse().unwrap(),
            target_version: "0.45".parse().unwrap(),
        };
        let diagnostics = validate_taxonomy(&taxonomy);
        assert!(has_errors(&diagnostics));
        assert_eq!(
            diagnostics
                .iter()
                .filter(|d| d.kind == DiagnosticKind::DuplicateId)
                .count(),
            1
        );
        assert_eq!(
            diagnostics
                .iter()
                .filter(|d| d.kind == DiagnosticKind::VersionOrder)
                .count(),
            1
        );
    }

    #[test]
    fn validate_emits_category_census() {
        let diagnostics = validate_taxonomy(&small_taxonomy());
        assert!(!has_errors(&diagnostics));
        let census = diagnostics
            .iter()
            .find(|d| d.kind == DiagnosticKind::CategoryCensus)
            .unwrap();
        assert_eq!(census.severity, Severity::Info);
        assert_eq!(
            census.message,
            "scenarios: 2 (deprecation 1, new-feature 1, structural 0)"
        );
    }

    #[test]
    fn category_partition_always_sums_to_total() {
        let taxonomy = small_taxonomy();
        let (total, dep, new, structural) = taxonomy.category_census();
        assert_eq!(total, dep + new + structural);
    }

    #[test]
    fn scenario_lookup() {
        let taxonomy = small_taxonomy();
        assert_eq!(
            scenario_by_id(&taxonomy, "QSK-046-002").map(|s| s.id.as_str()),
            Some("QSK-046-002")
        );
        assert_eq!(scenario_by_id(&taxonomy, "QSK-046-999"), None);
        assert_eq!(scenario_by_id(&taxonomy, "*"), None);
    }

    prop_compose! {
        fn arb_scenario(ordinal: usize)(
            summary in "\\PC{1,40}",
            artifact in "[a-zA-Z_][a-zA-Z0-9_.]{0,20}",
            example_source in "\\PC{1,40}",
            example_target in "\\PC{1,40}",
            difficulty in proptest::option::of("\\PC{1,10}"),
            impact in proptest::option::of("\\PC{1,10}"),
            category in prop_oneof![
                Just(ScenarioCategory::Deprecation),
                Just(ScenarioCategory::NewFeature),
                Just(ScenarioCategory::StructuralChange),
            ],
        ) -> MigrationScenario {
            MigrationScenario {
                id: format!("QSK-046-{ordinal:03}"),
                category,
                flow: MigrationFlow {
                    source_version: "0.45".parse().unwrap(),
                    target_version: "0.46".parse().unwrap(),
                },
                summary,
                artifacts: vec![artifact],
                example_source,
                example_target,
                difficulty,
                impact,
                references: Vec::new(),
            }
        }
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trip(raw in proptest::collection::vec(arb_scenario(0), 0..5)) {
            // Re-key so ids are unique regardless of how many rows were drawn.
            let scenarios: Vec<MigrationScenario> = raw
                .into_iter()
                .enumerate()
                .map(|(i, mut s)| {
                    s.id = format!("QSK-046-{:03}", i + 1);
                    s
                })
                .collect();
            let target = scenarios
                .iter()
                .map(|s| s.flow.target_version.clone())
                .max()
                .unwrap_or_else(VersionNumber::zero);
            let taxonomy = Taxonomy::new(target, scenarios);
            let text = serialize_taxonomy(&taxonomy);
            let parsed = parse_taxonomy(&text).unwrap();
            prop_assert_eq!(parsed, taxonomy);
        }
    }
}
