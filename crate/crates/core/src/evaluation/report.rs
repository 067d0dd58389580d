//! Score reports and their renderings.
//!
//! One [`ScoreReport`] summarizes one run (one prompt mode). The table-text
//! rendering mirrors the two-section summary layout (scenario
//! identification, then refactoring suggestions); CSV and JSON carry the
//! same counts and metrics. Derived metrics are kept at full precision and
//! rounded half-up to two decimals only for display, with the exact ratio
//! printed alongside so the rounding direction is always auditable.

use serde::{Deserialize, Serialize};

use crate::corpus::GroundTruth;
use crate::prompting::PromptMode;

use super::{
    missed_ratio, precision, recall, scenario_outcome, score_lines, score_scenarios,
    ConfusionCounts, GradedFinding, RubricGrade, ScenarioOutcome,
};

/// Per-snippet audit record, kept so either scenario-level reading
/// (miss vs false alarm) can be reconstructed from the report alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetOutcome {
    pub snippet_id: String,
    pub needs_refactoring: bool,
    pub finding_count: usize,
    pub expected_change_count: usize,
    pub outcome: ScenarioOutcome,
    pub line_tp: u64,
    pub line_fp: u64,
    pub line_fn: u64,
    pub ok: usize,
    pub ok_minor: usize,
    pub wrong_version: usize,
    pub incorrect: usize,
}

/// The scored summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub mode: PromptMode,
    pub scenario_counts: ConfusionCounts,
    pub line_counts: ConfusionCounts,
    pub scenario_precision: Option<f64>,
    pub scenario_recall: Option<f64>,
    pub line_precision: Option<f64>,
    pub line_recall: Option<f64>,
    pub missed_change_ratio: Option<f64>,
    pub per_snippet: Vec<SnippetOutcome>,
    pub notes: Vec<String>,
}

impl ScoreReport {
    /// Score one run. `results` must hold one entry per corpus snippet.
    pub fn build(mode: PromptMode, results: &[(GroundTruth, Vec<GradedFinding>)]) -> ScoreReport {
        let scenario_counts = score_scenarios(results);
        let line_counts = score_lines(results);
        let per_snippet = results
            .iter()
            .map(|(truth, graded)| {
                let single = (truth.clone(), graded.clone());
                let line = score_lines(std::slice::from_ref(&single));
                let count_grade = |g: RubricGrade| graded.iter().filter(|f| f.grade == g).count();
                SnippetOutcome {
                    snippet_id: truth.snippet_id.clone(),
                    needs_refactoring: truth.needs_refactoring,
                    finding_count: graded.len(),
                    expected_change_count: truth.changes.len(),
                    outcome: scenario_outcome(truth, graded),
                    line_tp: line.tp,
                    line_fp: line.fp,
                    line_fn: line.fn_,
                    ok: count_grade(RubricGrade::Ok),
                    ok_minor: count_grade(RubricGrade::OkMinor),
                    wrong_version: count_grade(RubricGrade::WrongVersion),
                    incorrect: count_grade(RubricGrade::Incorrect),
                }
            })
            .collect();
        ScoreReport {
            mode,
            scenario_counts,
            line_counts,
            scenario_precision: precision(&scenario_counts),
            scenario_recall: recall(&scenario_counts),
            line_precision: precision(&line_counts),
            line_recall: recall(&line_counts),
            missed_change_ratio: missed_ratio(line_counts.fn_, line_counts.tp + line_counts.fn_),
            per_snippet,
            notes: standard_notes(),
        }
    }

    /// Recompute every derived metric from the stored counts; used to
    /// guarantee the report never carries stale values.
    pub fn metrics_consistent(&self) -> bool {
        self.scenario_precision == precision(&self.scenario_counts)
            && self.scenario_recall == recall(&self.scenario_counts)
            && self.line_precision == precision(&self.line_counts)
            && self.line_recall == recall(&self.line_counts)
            && self.missed_change_ratio
                == missed_ratio(
                    self.line_counts.fn_,
                    self.line_counts.tp + self.line_counts.fn_,
                )
    }
}

fn standard_notes() -> Vec<String> {
    vec![
        "Metrics are recomputed from the stored counts at full precision: \
precision = TP/(TP+FP), recall = TP/(TP+FN), missed-change ratio = FN/(TP+FN)."
            .to_string(),
        "Scenario recall follows the formula exactly: counts of TP=12, FN=3 \
yield 0.80 even where third-party summaries print 0.85 for the same counts."
            .to_string(),
        "Display values are rounded half-up to 2 decimals; the exact ratio is \
printed alongside, so a display of 0.56 may correspond to a ratio elsewhere \
truncated to 0.55."
            .to_string(),
    ]
}

/// Half-up decimal rounding (0.005 rounds to 0.01).
pub fn round_half_up(value: f64, places: u32) -> f64 {
    let factor = 10f64.powi(places as i32);
    (value * factor + 0.5).floor() / factor
}

/// `0.57` or `n/a`.
pub fn format_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.2}", round_half_up(v, 2)),
        None => "n/a".to_string(),
    }
}

/// `0.57 (12/21, 0.571429)` — display value plus the exact ratio.
fn metric_cell(value: Option<f64>, numerator: u64, denominator: u64) -> String {
    match value {
        Some(v) => format!(
            "{} ({numerator}/{denominator}, {v:.6})",
            format_metric(value)
        ),
        None => format!("n/a ({numerator}/{denominator})"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TableText,
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse_token(token: &str) -> Option<ReportFormat> {
        match token {
            "table-text" | "text" => Some(ReportFormat::TableText),
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            _ => None,
        }
    }
}

fn mode_label(mode: PromptMode) -> &'static str {
    match mode {
        PromptMode::WithTaxonomy => "w/Tax",
        PromptMode::WithoutTaxonomy => "wo/Tax",
    }
}

/// Render one report.
pub fn render_report(report: &ScoreReport, format: ReportFormat) -> String {
    render_comparison(std::slice::from_ref(report), format)
}

/// Render one or more reports side by side (one column per mode).
pub fn render_comparison(reports: &[ScoreReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::TableText => render_table_text(reports),
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Json => render_json(reports),
    }
}

struct MetricRow {
    label: &'static str,
    cells: Vec<String>,
}

fn metric_rows(reports: &[ScoreReport]) -> (Vec<MetricRow>, Vec<MetricRow>) {
    let scenario_rows = vec![
        MetricRow {
            label: "Correctly identified scenarios that need refactoring (TP)",
            cells: reports
                .iter()
                .map(|r| r.scenario_counts.tp.to_string())
                .collect(),
        },
        MetricRow {
            label: "Correctly identified scenarios that do not need refactoring (TN)",
            cells: reports
                .iter()
                .map(|r| r.scenario_counts.tn.to_string())
                .collect(),
        },
        MetricRow {
            label: "FP",
            cells: reports
                .iter()
                .map(|r| r.scenario_counts.fp.to_string())
                .collect(),
        },
        MetricRow {
            label: "FN",
            cells: reports
                .iter()
                .map(|r| r.scenario_counts.fn_.to_string())
                .collect(),
        },
        MetricRow {
            label: "Precision",
            cells: reports
                .iter()
                .map(|r| {
                    metric_cell(
                        r.scenario_precision,
                        r.scenario_counts.tp,
                        r.scenario_counts.tp + r.scenario_counts.fp,
                    )
                })
                .collect(),
        },
        MetricRow {
            label: "Recall",
            cells: reports
                .iter()
                .map(|r| {
                    metric_cell(
                        r.scenario_recall,
                        r.scenario_counts.tp,
                        r.scenario_counts.tp + r.scenario_counts.fn_,
                    )
                })
                .collect(),
        },
    ];
    let line_rows = vec![
        MetricRow {
            label: "Correct suggestions (TP)",
            cells: reports
                .iter()
                .map(|r| r.line_counts.tp.to_string())
                .collect(),
        },
        MetricRow {
            label: "Incorrect suggestions (FP)",
            cells: reports
                .iter()
                .map(|r| r.line_counts.fp.to_string())
                .collect(),
        },
        MetricRow {
            label: "Missed suggestions (FN)",
            cells: reports
                .iter()
                .map(|r| r.line_counts.fn_.to_string())
                .collect(),
        },
        MetricRow {
            label: "Precision",
            cells: reports
                .iter()
                .map(|r| {
                    metric_cell(
                        r.line_precision,
                        r.line_counts.tp,
                        r.line_counts.tp + r.line_counts.fp,
                    )
                })
                .collect(),
        },
        MetricRow {
            label: "Recall",
            cells: reports
                .iter()
                .map(|r| {
                    metric_cell(
                        r.line_recall,
                        r.line_counts.tp,
                        r.line_counts.tp + r.line_counts.fn_,
                    )
                })
                .collect(),
        },
        MetricRow {
            label: "Missed-change ratio",
            cells: reports
                .iter()
                .map(|r| {
                    metric_cell(
                        r.missed_change_ratio,
                        r.line_counts.fn_,
                        r.line_counts.tp + r.line_counts.fn_,
                    )
                })
                .collect(),
        },
    ];
    (scenario_rows, line_rows)
}

fn render_table_text(reports: &[ScoreReport]) -> String {
    let (scenario_rows, line_rows) = metric_rows(reports);
    let headers: Vec<String> = std::iter::once("Metric".to_string())
        .chain(reports.iter().map(|r| mode_label(r.mode).to_string()))
        .collect();

    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    let all_rows = || scenario_rows.iter().chain(line_rows.iter());
    for row in all_rows() {
        widths[0] = widths[0].max(row.label.len());
        for (i, cell) in row.cells.iter().enumerate() {
            widths[i + 1] = widths[i + 1].max(cell.len());
        }
    }

    let fmt_row = |cells: &[String]| -> String {
        let mut line = String::from("|");
        for (i, cell) in cells.iter().enumerate() {
            line.push_str(&format!(" {:<width$} |", cell, width = widths[i]));
        }
        line
    };
    let section_row = |label: &str| -> String {
        let mut cells = vec![label.to_string()];
        cells.extend(std::iter::repeat_n(String::new(), reports.len()));
        fmt_row(&cells)
    };
    let separator = {
        let mut line = String::from("|");
        for width in &widths {
            line.push_str(&format!("{}|", "-".repeat(width + 2)));
        }
        line
    };

    let mut out = String::new();
    out.push_str(&fmt_row(&headers));
    out.push('\n');
    out.push_str(&separator);
    out.push('\n');
    out.push_str(&section_row("Scenario Identification"));
    out.push('\n');
    for row in &scenario_rows {
        let mut cells = vec![row.label.to_string()];
        cells.extend(row.cells.iter().cloned());
        out.push_str(&fmt_row(&cells));
        out.push('\n');
    }
    out.push_str(&section_row("Refactoring Suggestions"));
    out.push('\n');
    for row in &line_rows {
        let mut cells = vec![row.label.to_string()];
        cells.extend(row.cells.iter().cloned());
        out.push_str(&fmt_row(&cells));
        out.push('\n');
    }

    for report in reports {
        out.push('\n');
        out.push_str(&format!(
            "Per-snippet outcomes ({}):\n",
            mode_label(report.mode)
        ));
        for s in &report.per_snippet {
            out.push_str(&format!(
                "  {}: needs={} outcome={} findings={} expected={} line_tp={} line_fp={} line_fn={} grades=[ok={} ok-={} x+={} x={}]\n",
                s.snippet_id,
                if s.needs_refactoring { "yes" } else { "no" },
                s.outcome.token(),
                s.finding_count,
                s.expected_change_count,
                s.line_tp,
                s.line_fp,
                s.line_fn,
                s.ok,
                s.ok_minor,
                s.wrong_version,
                s.incorrect,
            ));
        }
    }

    if let Some(first) = reports.first() {
        out.push_str("\nNotes:\n");
        for note in &first.notes {
            out.push_str(&format!("  - {note}\n"));
        }
    }
    out
}

fn csv_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "n/a".to_string(),
    }
}

fn render_csv(reports: &[ScoreReport]) -> String {
    let mut out = String::from("mode,section,metric,value\n");
    for report in reports {
        let mode = report.mode.token();
        let rows: Vec<(&str, &str, String)> = vec![
            (
                "scenario_identification",
                "tp",
                report.scenario_counts.tp.to_string(),
            ),
            (
                "scenario_identification",
                "tn",
                report.scenario_counts.tn.to_string(),
            ),
            (
                "scenario_identification",
                "fp",
                report.scenario_counts.fp.to_string(),
            ),
            (
                "scenario_identification",
                "fn",
                report.scenario_counts.fn_.to_string(),
            ),
            (
                "scenario_identification",
                "precision",
                csv_metric(report.scenario_precision),
            ),
            (
                "scenario_identification",
                "recall",
                csv_metric(report.scenario_recall),
            ),
            (
                "refactoring_suggestions",
                "tp",
                report.line_counts.tp.to_string(),
            ),
            (
                "refactoring_suggestions",
                "fp",
                report.line_counts.fp.to_string(),
            ),
            (
                "refactoring_suggestions",
                "fn",
                report.line_counts.fn_.to_string(),
            ),
            (
                "refactoring_suggestions",
                "precision",
                csv_metric(report.line_precision),
            ),
            (
                "refactoring_suggestions",
                "recall",
                csv_metric(report.line_recall),
            ),
            (
                "refactoring_suggestions",
                "missed_change_ratio",
                csv_metric(report.missed_change_ratio),
            ),
        ];
        for (section, metric, value) in rows {
            out.push_str(&format!("{mode},{section},{metric},{value}\n"));
        }
        for s in &report.per_snippet {
            out.push_str(&format!(
                "{mode},per_snippet,{},{}\n",
                s.snippet_id,
                s.outcome.token()
            ));
        }
    }
    out
}

fn render_json(reports: &[ScoreReport]) -> String {
    let doc = serde_json::json!({ "reports": reports });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
