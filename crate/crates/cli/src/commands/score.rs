use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use qmigrate::corpus::load_corpus;
use qmigrate::evaluation::report::{render_comparison, ReportFormat, ScoreReport};
use qmigrate::evaluation::{grade_findings_tracking, GradedFinding, OverrideSet};
use qmigrate::response_parser::{parse_findings, resolve_findings, MigrationFinding};
use qmigrate::{GroundTruth, PromptMode};

use super::{env_failure, load_taxonomy, read_file, task_failure};
use crate::findings_io::{self, findings_file_name, response_file_name, write_atomic};

pub struct ScoreArgs {
    pub taxonomy: PathBuf,
    pub corpus: PathBuf,
    pub findings: Option<PathBuf>,
    pub responses: Option<PathBuf>,
    pub overrides: Option<PathBuf>,
    pub out: PathBuf,
}

enum Input {
    Findings(PathBuf),
    Responses(PathBuf),
}

pub fn run(args: ScoreArgs) -> ExitCode {
    let input = match (&args.findings, &args.responses) {
        (Some(dir), None) => Input::Findings(dir.clone()),
        (None, Some(dir)) => Input::Responses(dir.clone()),
        _ => return env_failure("exactly one of --findings or --responses is required"),
    };

    let taxonomy = match load_taxonomy(&args.taxonomy) {
        Ok(taxonomy) => taxonomy,
        Err(code) => return code,
    };
    let pairs = match load_corpus(&args.corpus, &taxonomy) {
        Ok(pairs) => pairs,
        Err(e) => return env_failure(e),
    };
    let overrides = match &args.overrides {
        Some(path) => match read_file(path) {
            Ok(text) => match OverrideSet::parse(&text) {
                Ok(set) => Some(set),
                Err(e) => return task_failure(e),
            },
            Err(code) => return code,
        },
        None => None,
    };

    let modes = match present_modes(&input) {
        Ok(modes) if modes.is_empty() => {
            return task_failure("no findings files found for any mode");
        }
        Ok(modes) => modes,
        Err(code) => return code,
    };

    let mut reports = Vec::new();
    let mut consumed_overrides: BTreeSet<(String, usize)> = BTreeSet::new();
    for mode in modes {
        let mut results: Vec<(GroundTruth, Vec<GradedFinding>)> = Vec::new();
        for (snippet, truth) in &pairs {
            let findings = match load_findings(&input, &snippet.id, mode) {
                Ok(findings) => findings,
                Err(code) => return code,
            };
            for diagnostic in resolve_findings(&findings, &taxonomy) {
                if diagnostic.is_error() {
                    eprintln!("warning: {} ({}): {diagnostic}", snippet.id, mode.token());
                }
            }
            let (graded, consumed) = grade_findings_tracking(&findings, truth, overrides.as_ref());
            for line_no in consumed {
                consumed_overrides.insert((truth.snippet_id.clone(), line_no));
            }
            results.push((truth.clone(), graded));
        }
        reports.push(ScoreReport::build(mode, &results));
    }

    if let Some(overrides) = &overrides {
        for (snippet_id, line_no) in overrides.keys() {
            if !consumed_overrides.contains(&(snippet_id.to_string(), line_no)) {
                return task_failure(format_args!(
                    "override for {snippet_id} line {line_no} matches no finding in any scored mode"
                ));
            }
        }
    }

    let text = render_comparison(&reports, ReportFormat::TableText);
    let csv = render_comparison(&reports, ReportFormat::Csv);
    let json = render_comparison(&reports, ReportFormat::Json);
    for (name, content) in [
        ("report.txt", &text),
        ("report.csv", &csv),
        ("report.json", &json),
    ] {
        if let Err(e) = write_atomic(&args.out.join(name), content) {
            return env_failure(e);
        }
    }
    print!("{text}");
    ExitCode::SUCCESS
}

/// Modes that have at least one findings/response file in the input dir.
fn present_modes(input: &Input) -> Result<Vec<PromptMode>, ExitCode> {
    let (dir, suffix) = match input {
        Input::Findings(dir) => (dir, ".findings.json"),
        Input::Responses(dir) => (dir, ".resp.txt"),
    };
    let entries = std::fs::read_dir(dir)
        .map_err(|e| env_failure(format_args!("cannot read {}: {e}", dir.display())))?;
    let mut present = BTreeSet::new();
    for entry in entries {
        let entry = entry.map_err(env_failure)?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(stem) = name.strip_suffix(suffix) else {
            continue;
        };
        for mode in PromptMode::ALL {
            if stem.ends_with(&format!(".{}", mode.token())) {
                present.insert(mode.token());
            }
        }
    }
    Ok(PromptMode::ALL
        .into_iter()
        .filter(|m| present.contains(m.token()))
        .collect())
}

fn load_findings(
    input: &Input,
    snippet_id: &str,
    mode: PromptMode,
) -> Result<Vec<MigrationFinding>, ExitCode> {
    match input {
        Input::Findings(dir) => {
            let path = dir.join(findings_file_name(snippet_id, mode));
            if !path.exists() {
                return Err(task_failure(format_args!(
                    "missing findings file for snippet {snippet_id} ({})",
                    mode.token()
                )));
            }
            let doc = findings_io::load(&path).map_err(task_failure)?;
            Ok(doc.findings)
        }
        Input::Responses(dir) => {
            let path = dir.join(response_file_name(snippet_id, mode));
            if !path.exists() {
                return Err(task_failure(format_args!(
                    "missing response file for snippet {snippet_id} ({})",
                    mode.token()
                )));
            }
            let raw = read_file(&path)?;
            parse_findings(&raw, mode).map_err(|e| task_failure(format_args!("{snippet_id}: {e}")))
        }
    }
}
