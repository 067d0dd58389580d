use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use sha2::{Digest, Sha256};

use qmigrate::llm::{
    request_key, ChatMessage, ChatRequest, ChatResponse, LiveConfig, LlmClient, Provider,
    DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT_ENV,
};
use qmigrate::prompting::{build_prompt, TemplateSet};
use qmigrate::response_parser::parse_findings;
use qmigrate::{CodeSnippet, PromptMode, Taxonomy, VersionNumber};

use super::{env_failure, load_taxonomy, read_file};
use crate::findings_io::{
    findings_file_name, response_file_name, to_json, write_atomic, FindingsDoc,
};
use crate::pool::map_bounded;
use crate::{ProviderArg, EXIT_TASK};

pub struct RunArgs {
    pub corpus: PathBuf,
    pub mode: PromptMode,
    pub taxonomy: Option<PathBuf>,
    pub templates: PathBuf,
    pub out: PathBuf,
    pub provider: ProviderArg,
    pub cassettes: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub script: Option<PathBuf>,
    pub record: bool,
    pub model: String,
    pub temperature: f64,
    pub target_version: String,
    pub jobs: usize,
}

#[derive(Serialize)]
struct Manifest {
    mode: String,
    model_id: String,
    temperature: f64,
    target_version: String,
    /// SHA-256 of the taxonomy file bytes; absent in no-tax runs.
    taxonomy_sha256: Option<String>,
    completions: usize,
    failures: usize,
    snippets: Vec<SnippetRecord>,
}

#[derive(Serialize)]
struct SnippetRecord {
    id: String,
    status: String,
    request_key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    response_file: String,
    findings_file: String,
}

pub fn run(args: RunArgs) -> ExitCode {
    let target_version: VersionNumber = match args.target_version.parse() {
        Ok(v) => v,
        Err(e) => return env_failure(e),
    };

    let taxonomy: Option<Taxonomy> = match (&args.mode, &args.taxonomy) {
        (PromptMode::WithTaxonomy, None) => {
            return env_failure("--mode with-tax requires --taxonomy");
        }
        (_, Some(path)) => match load_taxonomy(path) {
            Ok(taxonomy) => Some(taxonomy),
            Err(code) => return code,
        },
        (PromptMode::WithoutTaxonomy, None) => None,
    };
    let taxonomy_sha256 = match &args.taxonomy {
        Some(path) => match std::fs::read(path) {
            Ok(bytes) => Some(hex::encode(Sha256::digest(&bytes))),
            Err(e) => return env_failure(format_args!("cannot read {}: {e}", path.display())),
        },
        None => None,
    };

    let templates = match TemplateSet::load(&args.templates) {
        Ok(templates) => templates,
        Err(e) => return env_failure(e),
    };
    let snippets = match qmigrate::corpus::load_snippets(&args.corpus) {
        Ok(snippets) => snippets,
        Err(e) => return env_failure(e),
    };

    let client = match build_client(&args) {
        Ok(client) => client,
        Err(code) => return code,
    };

    let out_dir = args.out.clone();
    let results = map_bounded(snippets, args.jobs, |snippet| {
        process_snippet(
            snippet,
            &args,
            taxonomy.as_ref(),
            &target_version,
            &templates,
            &client,
            &out_dir,
        )
    });

    let completions = results.iter().filter(|r| r.status == "ok").count();
    let failures = results.len() - completions;
    let mut records = results;
    records.sort_by(|a, b| a.id.cmp(&b.id));

    let manifest = Manifest {
        mode: args.mode.token().to_string(),
        model_id: args.model.clone(),
        temperature: args.temperature,
        target_version: args.target_version.clone(),
        taxonomy_sha256,
        completions,
        failures,
        snippets: records,
    };
    let manifest_path = args
        .out
        .join(format!("manifest.{}.json", args.mode.token()));
    let mut manifest_text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_text.push('\n');
    if let Err(e) = write_atomic(&manifest_path, &manifest_text) {
        return env_failure(e);
    }

    println!(
        "run ({}): {completions} completed, {failures} failed, manifest {}",
        args.mode.token(),
        manifest_path.display()
    );
    if failures > 0 {
        for record in manifest.snippets.iter().filter(|r| r.status != "ok") {
            eprintln!(
                "  {}: {}",
                record.id,
                record.error.as_deref().unwrap_or("unknown")
            );
        }
        ExitCode::from(EXIT_TASK)
    } else {
        ExitCode::SUCCESS
    }
}

fn build_client(args: &RunArgs) -> Result<LlmClient, ExitCode> {
    match args.provider {
        ProviderArg::Replay => {
            let dir = args
                .cassettes
                .clone()
                .ok_or_else(|| env_failure("--provider replay requires --cassettes"))?;
            Ok(LlmClient::new(Provider::Replay { cassette_dir: dir }))
        }
        ProviderArg::Scripted => {
            let path = args
                .script
                .clone()
                .ok_or_else(|| env_failure("--provider scripted requires --script"))?;
            let text = read_file(&path)?;
            let responses: Vec<ChatResponse> = serde_json::from_str(&text)
                .map_err(|e| env_failure(format_args!("{}: {e}", path.display())))?;
            Ok(LlmClient::new(Provider::scripted(responses)))
        }
        ProviderArg::Live => {
            let endpoint = args
                .endpoint
                .clone()
                .or_else(|| std::env::var(DEFAULT_ENDPOINT_ENV).ok())
                .ok_or_else(|| {
                    env_failure(format_args!(
                        "--provider live requires --endpoint or {DEFAULT_ENDPOINT_ENV}"
                    ))
                })?;
            if std::env::var(DEFAULT_API_KEY_ENV).is_err() {
                return Err(env_failure(format_args!(
                    "--provider live requires the {DEFAULT_API_KEY_ENV} environment variable"
                )));
            }
            let record_dir = if args.record {
                Some(args.cassettes.clone().ok_or_else(|| {
                    env_failure("--record requires --cassettes as the recording directory")
                })?)
            } else {
                None
            };
            Ok(LlmClient::new(Provider::Live(LiveConfig {
                endpoint,
                api_key_env: DEFAULT_API_KEY_ENV.to_string(),
                record_dir,
            })))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn process_snippet(
    snippet: &CodeSnippet,
    args: &RunArgs,
    taxonomy: Option<&Taxonomy>,
    target_version: &VersionNumber,
    templates: &TemplateSet,
    client: &LlmClient,
    out_dir: &Path,
) -> SnippetRecord {
    let response_file = response_file_name(&snippet.id, args.mode);
    let findings_file = findings_file_name(&snippet.id, args.mode);
    let mut record = SnippetRecord {
        id: snippet.id.clone(),
        status: "ok".to_string(),
        request_key: String::new(),
        error: None,
        response_file: response_file.clone(),
        findings_file: findings_file.clone(),
    };
    let fail = |record: &mut SnippetRecord, error: String| {
        record.status = "failed".to_string();
        record.error = Some(error);
    };

    let bundle = match build_prompt(templates, snippet, taxonomy, target_version, args.mode) {
        Ok(bundle) => bundle,
        Err(e) => {
            fail(&mut record, e.to_string());
            return record;
        }
    };
    let request = ChatRequest {
        model_id: args.model.clone(),
        temperature: args.temperature,
        messages: vec![
            ChatMessage::system(bundle.system_text),
            ChatMessage::user(bundle.user_text),
        ],
    };
    record.request_key = request_key(&request);

    let response = match client.complete(&request) {
        Ok(response) => response,
        Err(e) => {
            fail(&mut record, e.to_string());
            return record;
        }
    };
    if let Err(e) = write_atomic(&out_dir.join(&response_file), &response.content) {
        fail(&mut record, e.to_string());
        return record;
    }

    match parse_findings(&response.content, args.mode) {
        Ok(findings) => {
            let doc = FindingsDoc {
                snippet_id: snippet.id.clone(),
                mode: args.mode,
                findings,
            };
            if let Err(e) = write_atomic(&out_dir.join(&findings_file), &to_json(&doc)) {
                fail(&mut record, e.to_string());
            }
        }
        Err(e) => fail(&mut record, format!("response did not parse: {e}")),
    }
    record
}
