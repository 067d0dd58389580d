use std::path::Path;
use std::process::ExitCode;

use qmigrate::baseline::{hits_to_findings, scan_snippet};
use qmigrate::corpus::load_snippets;
use qmigrate::PromptMode;

use super::{env_failure, load_taxonomy};
use crate::findings_io::{findings_file_name, to_json, write_atomic, FindingsDoc};

pub fn run(taxonomy_path: &Path, corpus_root: &Path, out_dir: &Path) -> ExitCode {
    let taxonomy = match load_taxonomy(taxonomy_path) {
        Ok(taxonomy) => taxonomy,
        Err(code) => return code,
    };
    let snippets = match load_snippets(corpus_root) {
        Ok(snippets) => snippets,
        Err(e) => return env_failure(e),
    };

    let mut total_findings = 0usize;
    for snippet in &snippets {
        let hits = scan_snippet(snippet, &taxonomy);
        let findings = hits_to_findings(&hits, &taxonomy);
        total_findings += findings.len();
        let doc = FindingsDoc {
            snippet_id: snippet.id.clone(),
            // Baseline findings always cite taxonomy ids.
            mode: PromptMode::WithTaxonomy,
            findings,
        };
        let path = out_dir.join(findings_file_name(&snippet.id, doc.mode));
        if let Err(e) = write_atomic(&path, &to_json(&doc)) {
            return env_failure(e);
        }
    }
    println!(
        "baseline: {} snippets scanned, {} findings written to {}",
        snippets.len(),
        total_findings,
        out_dir.display()
    );
    ExitCode::SUCCESS
}
