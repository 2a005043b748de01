//! Output directory layout, version 1:
//!
//! - `final_document.md`: the documentarian's output (raw, also on parse failure)
//! - `stories.md`: canonical re-rendering with a placeholder index
//! - `requirements.jsonl`: discrete requirements (rule decomposition)
//! - `transcript.jsonl`: one message per line
//! - `manifest.json`: config snapshot, termination, counts, timing
//! - `cassette.jsonl`: provider exchanges, only when recording

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{SessionError, SessionMode, SessionResult, Termination};
use crate::codec::{
    decompose_all, emit_markdown, placeholder_index, requirement_records, write_requirements, DecomposeMode,
    DocumentMeta,
};
use crate::model::{RunConfig, Transcript};
use crate::provider::Cassette;

pub const LAYOUT_VERSION: u32 = 1;

pub const ARTIFACT_FILES: [&str; 6] = [
    "final_document.md",
    "stories.md",
    "requirements.jsonl",
    "transcript.jsonl",
    "manifest.json",
    "cassette.jsonl",
];

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("output directory {0} is not empty (use --force to overwrite)")]
    NotEmpty(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Approved,
    CycleLimit,
    Baseline,
    ProviderFailure,
    ParseFailure,
    ProtocolFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub layout_version: u32,
    pub session_id: String,
    pub status: RunStatus,
    pub mode: SessionMode,
    pub provider: String,
    pub config: RunConfig,
    pub termination: Termination,
    pub provider_calls: usize,
    pub max_provider_calls: usize,
    pub message_count: usize,
    pub story_count: usize,
    pub requirement_count: usize,
    pub placeholder_count: usize,
    pub started_at: Option<DateTime<Utc>>,
    pub finished_at: Option<DateTime<Utc>>,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Creates `dir` or checks it is empty. With `force`, known artifact files
/// are removed and anything else is left alone.
pub fn prepare_output_dir(dir: &Path, force: bool) -> Result<(), ArtifactError> {
    if dir.exists() {
        let non_empty = fs::read_dir(dir).map_err(io_err(dir))?.next().is_some();
        if non_empty && !force {
            return Err(ArtifactError::NotEmpty(dir.to_path_buf()));
        }
        for name in ARTIFACT_FILES {
            let p = dir.join(name);
            if p.exists() {
                fs::remove_file(&p).map_err(io_err(&p))?;
            }
        }
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> Result<(), ArtifactError> {
        let p = self.dir.join(name);
        fs::write(&p, contents).map_err(io_err(&p))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn timing(t: &Transcript) -> (Option<DateTime<Utc>>, Option<DateTime<Utc>>) {
    (
        t.messages().first().map(|m| m.timestamp),
        t.messages().last().map(|m| m.timestamp),
    )
}

pub fn write_success(
    dir: &Path,
    result: &SessionResult,
    title: Option<&str>,
    provider: &str,
    cassette: Option<&Cassette>,
) -> Result<Manifest, ArtifactError> {
    let mut w = Writer {
        dir,
        files: Vec::new(),
    };
    w.put("final_document.md", &result.final_document)?;
    let meta = DocumentMeta {
        title: title.filter(|t| !t.is_empty()).map(str::to_string),
    };
    let stories_md = emit_markdown(&result.stories, &meta).expect("successful sessions have stories");
    w.put("stories.md", &stories_md)?;
    let decomposition = decompose_all(&result.stories, DecomposeMode::Rule);
    let records = requirement_records(&result.stories, &decomposition.requirements);
    w.put("requirements.jsonl", &write_requirements(&records))?;
    w.put("transcript.jsonl", &result.transcript.to_jsonl())?;
    if let Some(c) = cassette {
        w.put("cassette.jsonl", &c.to_jsonl())?;
    }
    let status = match (result.mode, result.termination.hit_cycle_limit()) {
        (SessionMode::Baseline, _) => RunStatus::Baseline,
        (SessionMode::Malea, true) => RunStatus::CycleLimit,
        (SessionMode::Malea, false) => RunStatus::Approved,
    };
    let (started_at, finished_at) = timing(&result.transcript);
    let config = result.transcript.config_snapshot.clone();
    let max_provider_calls = match result.mode {
        SessionMode::Baseline => 1,
        SessionMode::Malea => config.max_provider_calls(),
    };
    w.files.push("manifest.json".into());
    let manifest = Manifest {
        layout_version: LAYOUT_VERSION,
        session_id: result.transcript.session_id.clone(),
        status,
        mode: result.mode,
        provider: provider.to_string(),
        config,
        termination: result.termination,
        provider_calls: result.provider_calls,
        max_provider_calls,
        message_count: result.transcript.len(),
        story_count: result.stories.len(),
        requirement_count: records.len(),
        placeholder_count: placeholder_index(&result.stories).len(),
        started_at,
        finished_at,
        files: w.files.clone(),
        error: None,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    w.put("manifest.json", &json)?;
    Ok(manifest)
}

/// Persists what a failed session left behind. Config and persona errors
/// happen before any conversation and write nothing.
pub fn write_failure(
    dir: &Path,
    error: &SessionError,
    mode: SessionMode,
    config: &RunConfig,
    provider: &str,
    cassette: Option<&Cassette>,
) -> Result<Option<Manifest>, ArtifactError> {
    let (status, termination) = match error {
        SessionError::Provider { .. } => (RunStatus::ProviderFailure, Termination::default()),
        SessionError::Parse { termination, .. } => (RunStatus::ParseFailure, *termination),
        SessionError::Protocol { .. } => (RunStatus::ProtocolFailure, Termination::default()),
        SessionError::Config(_) | SessionError::Persona(_) => return Ok(None),
    };
    let transcript = error.transcript().expect("conversation errors carry a transcript");
    let mut w = Writer {
        dir,
        files: Vec::new(),
    };
    if let SessionError::Parse { raw, .. } = error {
        w.put("final_document.md", raw)?;
    }
    w.put("transcript.jsonl", &transcript.to_jsonl())?;
    if let Some(c) = cassette {
        w.put("cassette.jsonl", &c.to_jsonl())?;
    }
    let (started_at, finished_at) = timing(transcript);
    w.files.push("manifest.json".into());
    let manifest = Manifest {
        layout_version: LAYOUT_VERSION,
        session_id: transcript.session_id.clone(),
        status,
        mode,
        provider: provider.to_string(),
        config: config.clone(),
        termination,
        provider_calls: transcript.agent_turns(),
        max_provider_calls: match mode {
            SessionMode::Baseline => 1,
            SessionMode::Malea => config.max_provider_calls(),
        },
        message_count: transcript.len(),
        story_count: 0,
        requirement_count: 0,
        placeholder_count: 0,
        started_at,
        finished_at,
        files: w.files.clone(),
        error: Some(error.to_string()),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    w.put("manifest.json", &json)?;
    Ok(Some(manifest))
}
