//! Command-line front end: run sessions and baselines, lint, decompose,
//! evaluate and replay.
//!
//! Every command is a function taking parsed arguments and an output sink
//! and returning a [`CliError`] on failure, so tests can drive commands
//! without spawning processes. [`CliError::exit_code`] maps failures onto
//! the documented exit codes.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use malea_core::orchestrator::{ArtifactError, SessionError};
use malea_core::ConfigError;

mod commands;

pub use commands::{
    cmd_coverage, cmd_decompose, cmd_eval, cmd_lint, cmd_replay, cmd_run, cmd_suggest, load_config, parse_triples,
    EvalCase,
};

pub mod exit {
    pub const OK: i32 = 0;
    /// Lint findings under `--strict`, mapping validation findings, replay mismatch.
    pub const FINDINGS: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PROVIDER: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const IO: i32 = 5;
    pub const PROTOCOL: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Provider(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Protocol(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Findings(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => exit::CONFIG,
            CliError::Provider(_) => exit::PROVIDER,
            CliError::Parse(_) => exit::PARSE,
            CliError::Protocol(_) => exit::PROTOCOL,
            CliError::Io { .. } => exit::IO,
            CliError::Findings(_) => exit::FINDINGS,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ArtifactError> for CliError {
    fn from(e: ArtifactError) -> Self {
        match e {
            ArtifactError::NotEmpty(_) => CliError::Usage(e.to_string()),
            ArtifactError::Io { path, source } => CliError::Io { path, source },
        }
    }
}

impl From<&SessionError> for CliError {
    fn from(e: &SessionError) -> Self {
        match e {
            SessionError::Config(c) => CliError::Config(c.to_string()),
            SessionError::Persona(p) => CliError::Config(p.to_string()),
            SessionError::Provider { .. } => CliError::Provider(e.to_string()),
            SessionError::Parse { .. } => CliError::Parse(e.to_string()),
            SessionError::Protocol { .. } => CliError::Protocol(e.to_string()),
        }
    }
}

pub(crate) fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(CliError::io(Path::new("<stdout>")))
}

#[derive(Debug, Parser)]
#[command(name = "malea", version, about = "Multi-agent elicitation of ethics requirements")]
pub struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a session (or a single-call baseline) and write its artifacts.
    Run(RunArgs),
    /// Rerun a recorded session from its cassette and compare the outputs.
    Replay(ReplayArgs),
    /// Check user stories against the quality criteria.
    Lint(LintArgs),
    /// Split user stories into discrete requirements (JSONL export).
    Decompose(DecomposeArgs),
    /// Score mappings against gold sets.
    Eval(EvalArgs),
    /// Count requirement hits per ethics topic.
    Coverage(CoverageArgs),
    /// Draft a mapping with a model; every row is marked unreviewed.
    Suggest(SuggestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// System description (markdown; a leading `# ` heading is the title).
    #[arg(short, long)]
    pub description: PathBuf,
    /// TOML config whose keys mirror the run settings; defaults when absent.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Single-call comparison mode.
    #[arg(long)]
    pub baseline: bool,
    /// Answer from a cassette instead of the network.
    #[arg(long, value_name = "CASSETTE", conflicts_with = "record")]
    pub replay: Option<PathBuf>,
    /// Save every exchange to cassette.jsonl in the output directory.
    #[arg(long)]
    pub record: bool,
    #[arg(long)]
    pub seed: Option<i64>,
    #[arg(long)]
    pub max_cycles: Option<u32>,
    /// Directory of persona templates overriding the built-in ones.
    #[arg(long)]
    pub personas: Option<PathBuf>,
    /// Overwrite artifacts in a non-empty output directory.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Directory written by `run --record` (manifest.json and cassette.jsonl).
    pub run_dir: PathBuf,
    #[arg(short, long)]
    pub description: PathBuf,
    /// Directory of persona templates used for the recording.
    #[arg(long)]
    pub personas: Option<PathBuf>,
    /// Also write the replayed artifacts here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LintArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Exit nonzero when any violation is found.
    #[arg(long)]
    pub strict: bool,
    /// Vague-term lexicon, one term per line, replacing the built-in one.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    pub stories: PathBuf,
    /// Write the export here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Ask the configured model to split criteria (falls back per story).
    #[arg(long)]
    pub llm: bool,
    #[arg(short, long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// One or more GOLD MAPPING REQUIREMENTS triples (use `-` for no
    /// requirements export).
    #[arg(required = true, num_args = 3.., value_name = "GOLD MAPPING REQUIREMENTS")]
    pub files: Vec<PathBuf>,
    /// Print pooled figures over all triples.
    #[arg(long)]
    pub aggregate: bool,
    /// Report despite validation findings.
    #[arg(long)]
    pub force: bool,
    /// Row labels, one per triple; defaults to the mapping's directory.
    #[arg(long)]
    pub label: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    pub requirements: PathBuf,
    /// Topic keyword file replacing the built-in one.
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    #[arg(short, long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SuggestArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub requirements: PathBuf,
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command line; returns the process exit code.
pub fn run_cli(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, None, out),
        Command::Replay(a) => cmd_replay(&a, out),
        Command::Lint(a) => cmd_lint(&a, out),
        Command::Decompose(a) => cmd_decompose(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Coverage(a) => cmd_coverage(&a, out),
        Command::Suggest(a) => cmd_suggest(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
