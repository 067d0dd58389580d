mod commands;
mod findings_io;
mod pool;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success, 1 task-level failure, 2 environment/input failure.
pub const EXIT_TASK: u8 = 1;
pub const EXIT_ENV: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qmigrate",
    about = "Taxonomy-guided migration assistant: prompt a model over a snippet corpus, parse its findings, and score them",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    #[value(name = "with-tax")]
    WithTax,
    #[value(name = "no-tax")]
    NoTax,
}

impl ModeArg {
    fn to_mode(self) -> qmigrate::PromptMode {
        match self {
            ModeArg::WithTax => qmigrate::PromptMode::WithTaxonomy,
            ModeArg::NoTax => qmigrate::PromptMode::WithoutTaxonomy,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProviderArg {
    Live,
    Replay,
    Scripted,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a taxonomy file, printing diagnostics.
    Validate {
        /// Taxonomy file to check.
        #[arg(long)]
        taxonomy: PathBuf,
    },
    /// Print a source file with line numbers inserted.
    Annotate {
        /// Source file to number.
        source: PathBuf,
    },
    /// Run the keyword baseline over a corpus, writing findings files.
    Baseline {
        #[arg(long)]
        taxonomy: PathBuf,
        /// Corpus directory (`<id>.src` files).
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for findings files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Prompt the model once per snippet and persist raw responses plus
    /// parsed findings.
    Run {
        /// Corpus directory (`<id>.src` files).
        #[arg(long)]
        corpus: PathBuf,
        /// Prompt mode.
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Taxonomy file (required in with-tax mode).
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        /// Template directory.
        #[arg(long, default_value = "data/templates")]
        templates: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Completion provider.
        #[arg(long, value_enum)]
        provider: ProviderArg,
        /// Cassette directory (replay provider, or live with --record).
        #[arg(long)]
        cassettes: Option<PathBuf>,
        /// Chat-completion endpoint URL (live provider; falls back to
        /// QMIGRATE_ENDPOINT).
        #[arg(long)]
        endpoint: Option<String>,
        /// JSON file with a list of scripted responses (scripted provider).
        #[arg(long)]
        script: Option<PathBuf>,
        /// Record live exchanges as cassettes under --cassettes.
        #[arg(long)]
        record: bool,
        /// Model identifier sent to the provider.
        #[arg(long, default_value = "gpt-4-0613")]
        model: String,
        /// Sampling temperature.
        #[arg(long, default_value_t = 0.1)]
        temperature: f64,
        /// Target library version.
        #[arg(long, default_value = "0.46")]
        target_version: String,
        /// Maximum concurrent snippets.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
    /// Grade persisted findings against the corpus ground truth and write
    /// reports.
    Score {
        #[arg(long)]
        taxonomy: PathBuf,
        /// Corpus directory (`<id>.src` + `<id>.truth`).
        #[arg(long)]
        corpus: PathBuf,
        /// Directory with `<id>.<mode>.findings.json` files (a run or
        /// baseline output directory).
        #[arg(long)]
        findings: Option<PathBuf>,
        /// Directory with raw `<id>.<mode>.resp.txt` responses to parse
        /// instead of pre-parsed findings.
        #[arg(long)]
        responses: Option<PathBuf>,
        /// Manual grade overrides file.
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Output directory for report.txt/report.csv/report.json.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { taxonomy } => commands::validate::run(&taxonomy),
        Command::Annotate { source } => commands::annotate::run(&source),
        Command::Baseline {
            taxonomy,
            corpus,
            out,
        } => commands::baseline::run(&taxonomy, &corpus, &out),
        Command::Run {
            corpus,
            mode,
            taxonomy,
            templates,
            out,
            provider,
            cassettes,
            endpoint,
            script,
            record,
            model,
            temperature,
            target_version,
            jobs,
        } => commands::run::run(commands::run::RunArgs {
            corpus,
            mode: mode.to_mode(),
            taxonomy,
            templates,
            out,
            provider,
            cassettes,
            endpoint,
            script,
            record,
            model,
            temperature,
            target_version,
            jobs,
        }),
        Command::Score {
            taxonomy,
            corpus,
            findings,
            responses,
            overrides,
            out,
        } => commands::score::run(commands::score::ScoreArgs {
            taxonomy,
            corpus,
            findings,
            responses,
            overrides,
            out,
        }),
    }
}
