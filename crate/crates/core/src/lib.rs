//! Taxonomy-guided migration assistance for quantum-SDK code bases.
//!
//! The crate models a migration taxonomy (a pipe-delimited table of known
//! API changes between library versions), a corpus of annotated code
//! snippets, prompt construction for chat-completion models, an offline
//! record/replay client, a parser for the model's structured table output,
//! a deterministic keyword baseline, and a rubric-based scoring pipeline
//! that produces confusion-matrix reports.

pub mod baseline;
pub mod corpus;
pub mod evaluation;
pub mod llm;
pub mod pipe_table;
pub mod prompting;
pub mod response_parser;
pub mod taxonomy;
pub mod version;

pub use corpus::{CodeSnippet, ExpectedChange, GroundTruth};
pub use prompting::{PromptBundle, PromptMode, TemplateSet};
pub use response_parser::{MigrationFinding, ScenarioRef};
pub use taxonomy::{MigrationFlow, MigrationScenario, ScenarioCategory, Taxonomy};
pub use version::VersionNumber;
