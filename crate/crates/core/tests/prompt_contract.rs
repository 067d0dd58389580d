//! Contract checks against the templates shipped under `data/templates`:
//! what each mode's prompt must and must not contain.

use std::path::PathBuf;

use qmigrate::corpus::{load_snippets, number_lines};
use qmigrate::prompting::{build_prompt, TemplateSet};
use qmigrate::taxonomy::{parse_taxonomy, serialize_taxonomy};
use qmigrate::{PromptMode, Taxonomy};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn setup() -> (TemplateSet, Taxonomy, Vec<qmigrate::CodeSnippet>) {
    let templates = TemplateSet::load(&data_dir().join("templates")).unwrap();
    let text = std::fs::read_to_string(data_dir().join("taxonomy/qiskit-0.46.md")).unwrap();
    let taxonomy = parse_taxonomy(&text).unwrap();
    let snippets = load_snippets(&data_dir().join("corpus")).unwrap();
    (templates, taxonomy, snippets)
}

#[test]
fn with_taxonomy_prompts_carry_the_full_payload() {
    let (templates, taxonomy, snippets) = setup();
    let serialized = serialize_taxonomy(&taxonomy);
    for snippet in &snippets {
        let bundle = build_prompt(
            &templates,
            snippet,
            Some(&taxonomy),
            &taxonomy.target_version,
            PromptMode::WithTaxonomy,
        )
        .unwrap();
        assert!(
            bundle.user_text.contains(&serialized),
            "{}: taxonomy table",
            snippet.id
        );
        assert!(
            bundle.user_text.contains(&number_lines(&snippet.source)),
            "{}: numbered snippet",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("asterisk (*)"),
            "{}: asterisk rule",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("Scenario ID"),
            "{}: six columns",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("(optional)"),
            "{}: optional rule",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("using your prior knowledge"),
            "{}: prior-knowledge phrase",
            snippet.id
        );
        assert!(
            bundle.system_text.contains("0.46"),
            "{}: version in system",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("0.46"),
            "{}: version in user",
            snippet.id
        );
    }
}

#[test]
fn without_taxonomy_prompts_leak_nothing_from_the_taxonomy() {
    let (templates, taxonomy, snippets) = setup();
    for snippet in &snippets {
        let bundle = build_prompt(
            &templates,
            snippet,
            None,
            &taxonomy.target_version,
            PromptMode::WithoutTaxonomy,
        )
        .unwrap();
        assert!(
            !bundle.user_text.contains("Scenario ID"),
            "{}: id column leaked",
            snippet.id
        );
        assert!(
            !bundle.user_text.contains("QSK-046-"),
            "{}: scenario id leaked",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("five columns"),
            "{}: five-column rule",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("(optional)"),
            "{}: optional rule",
            snippet.id
        );
        assert!(
            bundle.user_text.contains("using your prior knowledge"),
            "{}: prior-knowledge phrase",
            snippet.id
        );
        assert!(bundle.system_text.contains("0.46") && bundle.user_text.contains("0.46"));
    }
}

#[test]
fn prompt_building_is_deterministic_per_snippet() {
    let (templates, taxonomy, snippets) = setup();
    let snippet = &snippets[0];
    for mode in PromptMode::ALL {
        let taxonomy_arg = (mode == PromptMode::WithTaxonomy).then_some(&taxonomy);
        let build = || {
            build_prompt(
                &templates,
                snippet,
                taxonomy_arg,
                &taxonomy.target_version,
                mode,
            )
            .unwrap()
        };
        assert_eq!(build(), build(), "mode {mode}");
    }
}
