//! Prompt construction for the two experiment modes.
//!
//! Templates are external files with `{{placeholder}}` substitution; the
//! structured-output column contract is generated in code so it always
//! matches what [`crate::response_parser`] accepts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{number_lines, CodeSnippet};
use crate::response_parser::{FIVE_COLUMNS, SIX_COLUMNS};
use crate::taxonomy::{serialize_taxonomy, Taxonomy};
use crate::version::VersionNumber;

/// Whether the taxonomy is embedded in the prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PromptMode {
    #[serde(rename = "with-tax")]
    WithTaxonomy,
    #[serde(rename = "no-tax")]
    WithoutTaxonomy,
}

impl PromptMode {
    /// Short token used in file names and flags.
    pub fn token(&self) -> &'static str {
        match self {
            PromptMode::WithTaxonomy => "with-tax",
            PromptMode::WithoutTaxonomy => "no-tax",
        }
    }

    pub fn parse_token(token: &str) -> Option<PromptMode> {
        match token {
            "with-tax" => Some(PromptMode::WithTaxonomy),
            "no-tax" => Some(PromptMode::WithoutTaxonomy),
            _ => None,
        }
    }

    pub const ALL: [PromptMode; 2] = [PromptMode::WithTaxonomy, PromptMode::WithoutTaxonomy];
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The exact system/user text pair for one snippet in one mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub mode: PromptMode,
    pub target_version: VersionNumber,
    pub system_text: String,
    pub user_text: String,
    pub snippet_id: String,
}

/// The four template files loaded from a template directory.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub system_with_tax: String,
    pub user_with_tax: String,
    pub system_no_tax: String,
    pub user_no_tax: String,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("cannot read template {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("with-taxonomy mode requires a taxonomy")]
    MissingTaxonomy,
    #[error("taxonomy targets version {taxonomy} but the run targets {requested}")]
    VersionMismatch {
        taxonomy: VersionNumber,
        requested: VersionNumber,
    },
    #[error("unresolved template placeholder {{{{{0}}}}}")]
    TemplateError(String),
}

impl TemplateSet {
    /// Load `system_with_tax.tpl`, `user_with_tax.tpl`, `system_no_tax.tpl`
    /// and `user_no_tax.tpl` from `dir`.
    pub fn load(dir: &Path) -> Result<TemplateSet, PromptError> {
        let read = |name: &str| -> Result<String, PromptError> {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|source| PromptError::Io { path, source })
        };
        Ok(TemplateSet {
            system_with_tax: read("system_with_tax.tpl")?,
            user_with_tax: read("user_with_tax.tpl")?,
            system_no_tax: read("system_no_tax.tpl")?,
            user_no_tax: read("user_no_tax.tpl")?,
        })
    }
}

/// The structured-output instruction for one mode.
///
/// Six columns with the taxonomy (including the asterisk no-match rule),
/// five without. Both state the `(optional)` labeling rule.
pub fn column_instruction(mode: PromptMode, target_version: &VersionNumber) -> String {
    match mode {
        PromptMode::WithTaxonomy => format!(
            "Respond with a markdown table and nothing else around it that matters. \
The table must have exactly these six columns, in this order: {}.\n\
- Line: the line number shown in the numbered source (one row per line; you may group a contiguous block as N-M).\n\
- Code: the exact source line being analyzed.\n\
- Scenario ID: the identifier of the matching taxonomy scenario, or an asterisk (*) if no taxonomy scenario matches.\n\
- Scenario: the scenario category and a short summary, e.g. Deprecation \u{2192} function_name() deprecated; append the label (optional) when the update is not mandatory for compatibility with version {v}.\n\
- Artifact: the affected module, class, function, or parameter, taken from the taxonomy's Artifacts column.\n\
- Refactoring: the recommended replacement code for versions >= {v}; leave the cell blank if you are unsure.",
            SIX_COLUMNS.join(" | "),
            v = target_version,
        ),
        PromptMode::WithoutTaxonomy => format!(
            "Respond with a markdown table and nothing else around it that matters. \
The table must have exactly these five columns, in this order: {}.\n\
- Line: the line number shown in the numbered source (one row per line; you may group a contiguous block as N-M).\n\
- Code: the exact source line being analyzed.\n\
- Scenario: a short description of the change and the affected artifact, e.g. Deprecation \u{2192} function_name() deprecated; append the label (optional) when the update is not mandatory for compatibility with version {v}.\n\
- Artifact: the module, method, or parameter involved in the migration.\n\
- Refactoring: the proposed code change for compatibility with version >= {v}; leave the cell blank if you are unsure.",
            FIVE_COLUMNS.join(" | "),
            v = target_version,
        ),
    }
}

/// Assemble the prompt pair for one snippet.
///
/// Pure: identical inputs (and template text) produce byte-identical
/// bundles. The snippet is embedded in numbered form.
pub fn build_prompt(
    templates: &TemplateSet,
    snippet: &CodeSnippet,
    taxonomy: Option<&Taxonomy>,
    target_version: &VersionNumber,
    mode: PromptMode,
) -> Result<PromptBundle, PromptError> {
    let taxonomy_text = match mode {
        PromptMode::WithTaxonomy => {
            let taxonomy = taxonomy.ok_or(PromptError::MissingTaxonomy)?;
            if &taxonomy.target_version != target_version {
                return Err(PromptError::VersionMismatch {
                    taxonomy: taxonomy.target_version.clone(),
                    requested: target_version.clone(),
                });
            }
            Some(serialize_taxonomy(taxonomy))
        }
        PromptMode::WithoutTaxonomy => None,
    };

    let (system_template, user_template) = match mode {
        PromptMode::WithTaxonomy => (&templates.system_with_tax, &templates.user_with_tax),
        PromptMode::WithoutTaxonomy => (&templates.system_no_tax, &templates.user_no_tax),
    };

    let version_text = target_version.to_string();
    let columns = column_instruction(mode, target_version);
    let numbered = number_lines(&snippet.source);

    let mut substitutions: Vec<(&str, &str)> = vec![
        ("target_version", version_text.as_str()),
        ("columns", columns.as_str()),
        ("code", numbered.as_str()),
    ];
    if let Some(taxonomy_text) = taxonomy_text.as_deref() {
        substitutions.push(("taxonomy", taxonomy_text));
    }

    Ok(PromptBundle {
        mode,
        target_version: target_version.clone(),
        system_text: substitute(system_template, &substitutions)?,
        user_text: substitute(user_template, &substitutions)?,
        snippet_id: snippet.id.clone(),
    })
}

/// Replace `{{name}}` placeholders. Names with no substitution are an
/// error; placeholder syntax never nests.
fn substitute(template: &str, substitutions: &[(&str, &str)]) -> Result<String, PromptError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let Some(end) = after.find("}}") else {
            return Err(PromptError::TemplateError(after.trim().to_string()));
        };
        let name = after[..end].trim();
        let value = substitutions
            .iter()
            .find(|(key, _)| *key == name)
            .map(|(_, value)| *value)
            .ok_or_else(|| PromptError::TemplateError(name.to_string()))?;
        out.push_str(value);
        rest = &after[end + 2..];
    }
    out.push_str(rest);
    Ok(out)
}
