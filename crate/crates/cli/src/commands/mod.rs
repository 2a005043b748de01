use std::fs;
use std::path::Path;

use malea_core::persona::PersonaEngine;
use malea_core::provider::{Cassette, HttpProvider, API_KEY_ENV};
use malea_core::{RunConfig, SystemDescription};

use crate::CliError;

mod eval;
mod session;
mod stories;

pub use eval::{cmd_coverage, cmd_eval, cmd_suggest, parse_triples, EvalCase};
pub use session::{cmd_replay, cmd_run};
pub use stories::{cmd_decompose, cmd_lint};

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(CliError::io(path))
}

/// The config file when given, built-in defaults otherwise.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::from_toml(&read_file(p)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => Ok(RunConfig::default()),
    }
}

pub(crate) fn load_description(path: &Path) -> Result<SystemDescription, CliError> {
    SystemDescription::from_markdown(&read_file(path)?)
        .map_err(|_| CliError::Usage(format!("{}: description is empty", path.display())))
}

pub(crate) fn load_cassette(path: &Path) -> Result<Cassette, CliError> {
    Cassette::from_jsonl(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub(crate) fn load_personas(dir: Option<&Path>) -> Result<PersonaEngine, CliError> {
    match dir {
        Some(d) => PersonaEngine::load_dir(d).map_err(|e| CliError::Config(format!("{}: {e}", d.display()))),
        None => Ok(PersonaEngine::builtin()),
    }
}

/// Live provider for the configured endpoint; the key is read from the
/// environment only.
pub(crate) fn live_provider(config: &RunConfig) -> Result<HttpProvider, CliError> {
    if std::env::var(API_KEY_ENV).map_or(true, |k| k.is_empty()) {
        return Err(CliError::Config(format!(
            "{API_KEY_ENV} is not set; live calls need an API key (or use --replay)"
        )));
    }
    HttpProvider::from_env(config.provider_endpoint.clone()).map_err(|e| CliError::Provider(e.to_string()))
}
