//! The conversation controller: draft, quality loop, ethics loop,
//! documentation, with bounded critique cycles.

mod artifacts;
mod clock;
mod state;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::parse_document;
use crate::lint::{lint_report, Lexicon};
use crate::model::{
    AgentRole, ConfigError, Message, Phase, RunConfig, SystemDescription, Transcript, UserStory,
};
use crate::persona::{build_initiator, PersonaEngine, PersonaError, PersonaPrompt};
use crate::provider::{ChatProvider, ChatRequest, ProviderError};

pub use artifacts::{
    prepare_output_dir, write_failure, write_success, ArtifactError, Manifest, RunStatus, ARTIFACT_FILES,
    LAYOUT_VERSION,
};
pub use clock::{Clock, SteppingClock, SystemClock};
pub use state::{step, PhaseOutcome, ProtocolError, SessionState, Termination};

pub const REFORMAT_REQUEST: &str = "Requirements Engineer, your last message could not be read as \
user stories. Rewrite the same requirements without changing their content. Write each story on \
one line as \"As a <role>, I want <goal>, so that <benefit>.\", followed by a line \"Acceptance \
Criteria:\" and one bullet per criterion.";

/// Everything a session needs besides config, description and provider.
#[derive(Clone)]
pub struct SessionEnv {
    pub personas: PersonaEngine,
    pub clock: Arc<dyn Clock>,
    pub lexicon: Lexicon,
}

impl Default for SessionEnv {
    fn default() -> Self {
        Self {
            personas: PersonaEngine::builtin(),
            clock: Arc::new(SystemClock),
            lexicon: Lexicon::default(),
        }
    }
}

impl SessionEnv {
    /// Timestamps from a stepping clock at the Unix epoch, for replay.
    pub fn deterministic() -> Self {
        Self {
            clock: Arc::new(SteppingClock::epoch()),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionMode {
    Malea,
    Baseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub mode: SessionMode,
    pub final_document: String,
    pub stories: Vec<UserStory>,
    pub transcript: Transcript,
    pub termination: Termination,
    pub provider_calls: usize,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Persona(#[from] PersonaError),
    #[error("provider failure: {error}")]
    Provider {
        error: ProviderError,
        transcript: Box<Transcript>,
    },
    #[error("final document could not be parsed: {reason}")]
    Parse {
        reason: String,
        raw: String,
        transcript: Box<Transcript>,
        termination: Termination,
    },
    #[error("protocol violation: {error}")]
    Protocol {
        error: ProtocolError,
        transcript: Box<Transcript>,
    },
}

impl SessionError {
    /// The conversation up to the failure, when one was started.
    pub fn transcript(&self) -> Option<&Transcript> {
        match self {
            SessionError::Provider { transcript, .. }
            | SessionError::Parse { transcript, .. }
            | SessionError::Protocol { transcript, .. } => Some(transcript),
            _ => None,
        }
    }
}

/// Stable id from the inputs and the start time.
pub fn session_id(description: &SystemDescription, config: &RunConfig, start: &str) -> String {
    let mut h = Sha256::new();
    h.update(description.title().as_bytes());
    h.update([0]);
    h.update(description.body().as_bytes());
    h.update([0]);
    h.update(config.to_toml().as_bytes());
    h.update([0]);
    h.update(start.as_bytes());
    hex::encode(h.finalize())[..16].to_string()
}

/// Why a draft or document cannot be used as a story set, if it cannot.
pub fn unusable_reason(text: &str) -> Option<String> {
    let doc = parse_document(text);
    if doc.stories.is_empty() {
        return Some("no user stories found".into());
    }
    let bare: Vec<&str> = doc
        .stories
        .iter()
        .filter(|s| s.criteria.is_empty())
        .map(|s| s.id.as_str())
        .collect();
    if !bare.is_empty() {
        return Some(format!("stories without acceptance criteria: {}", bare.join(", ")));
    }
    None
}

/// Group-chat view for one agent: its own turns are `assistant`, everyone
/// else's are `user` and carry the speaker's name.
fn history_for(role: AgentRole, transcript: &Transcript) -> Vec<(String, String)> {
    transcript
        .messages()
        .iter()
        .map(|m| {
            if m.role == role {
                ("assistant".to_string(), m.content.clone())
            } else {
                ("user".to_string(), format!("{}:\n{}", m.role.display_name(), m.content))
            }
        })
        .collect()
}

fn call(
    provider: &dyn ChatProvider,
    request: &ChatRequest,
    transcript: &Transcript,
) -> Result<crate::provider::ChatResponse, SessionError> {
    provider
        .complete(request)
        .and_then(|r| r.validate())
        .map_err(|error| SessionError::Provider {
            error,
            transcript: Box::new(transcript.clone()),
        })
}

fn finish(
    mode: SessionMode,
    raw: String,
    transcript: Transcript,
    termination: Termination,
) -> Result<SessionResult, SessionError> {
    if let Some(reason) = unusable_reason(&raw) {
        return Err(SessionError::Parse {
            reason,
            raw,
            transcript: Box::new(transcript),
            termination,
        });
    }
    let stories = parse_document(&raw).stories;
    Ok(SessionResult {
        mode,
        final_document: raw,
        stories,
        provider_calls: transcript.agent_turns(),
        transcript,
        termination,
    })
}

/// Runs the full pipeline with the shipped personas and the system clock.
pub fn run_session(
    config: &RunConfig,
    description: &SystemDescription,
    provider: &dyn ChatProvider,
) -> Result<SessionResult, SessionError> {
    run_session_with(config, description, provider, &SessionEnv::default())
}

pub fn run_session_with(
    config: &RunConfig,
    description: &SystemDescription,
    provider: &dyn ChatProvider,
    env: &SessionEnv,
) -> Result<SessionResult, SessionError> {
    config.validate()?;
    let personas: BTreeMap<AgentRole, PersonaPrompt> = AgentRole::LLM_AGENTS
        .iter()
        .map(|r| env.personas.build(*r, &config.themes, config).map(|p| (*r, p)))
        .collect::<Result<_, _>>()?;

    let start = env.clock.now();
    let id = session_id(description, config, &start.to_rfc3339());
    let mut state = SessionState::new(Transcript::new(id, config.clone()));
    let protocol = |error: ProtocolError, state: &SessionState| SessionError::Protocol {
        error,
        transcript: Box::new(state.transcript.clone()),
    };
    let initiator = build_initiator(description, config, start);
    state.apply(initiator).map_err(|e| protocol(e, &state))?;

    while let Some(speaker) = state.expected_speaker() {
        if state.can_request_reformat() {
            if let Some(reason) = unusable_reason(&state.current_draft) {
                log::warn!("draft unusable ({reason}); asking for a reformat");
                let m = Message {
                    seq: state.transcript.next_seq(),
                    role: AgentRole::Controller,
                    phase: state.phase,
                    content: REFORMAT_REQUEST.to_string(),
                    tokens_in: 0,
                    tokens_out: 0,
                    timestamp: env.clock.now(),
                };
                state.apply(m).map_err(|e| protocol(e, &state))?;
                continue;
            }
        }
        let persona = &personas[&speaker];
        let request = ChatRequest {
            system_prompt: persona.text.clone(),
            history: history_for(speaker, &state.transcript),
            temperature: Some(config.temperature),
            model_name: config.model_name.clone(),
            seed: config.seed,
        };
        log::info!("{} turn in {}", speaker.display_name(), state.phase);
        let response = call(provider, &request, &state.transcript)?;
        let m = Message {
            seq: state.transcript.next_seq(),
            role: speaker,
            phase: state.phase,
            content: response.content,
            tokens_in: response.tokens_in,
            tokens_out: response.tokens_out,
            timestamp: env.clock.now(),
        };
        state.apply(m).map_err(|e| protocol(e, &state))?;
        if speaker == AgentRole::RequirementsEngineer && state.phase == Phase::QualityReview {
            let report = lint_report(&parse_document(&state.current_draft).stories, &env.lexicon);
            log::info!("lint before quality review: {}", report.to_text().lines().last().unwrap_or(""));
        }
    }

    let termination = state.termination();
    let raw = state.final_document().unwrap_or_default().to_string();
    finish(SessionMode::Malea, raw, state.transcript, termination)
}

/// Single-call comparison mode: the initiator text as a standalone prompt.
pub fn run_baseline(
    config: &RunConfig,
    description: &SystemDescription,
    provider: &dyn ChatProvider,
) -> Result<SessionResult, SessionError> {
    run_baseline_with(config, description, provider, &SessionEnv::default())
}

pub fn run_baseline_with(
    config: &RunConfig,
    description: &SystemDescription,
    provider: &dyn ChatProvider,
    env: &SessionEnv,
) -> Result<SessionResult, SessionError> {
    config.validate()?;
    let start = env.clock.now();
    let id = session_id(description, config, &start.to_rfc3339());
    let mut transcript = Transcript::new(id, config.clone());
    let initiator = build_initiator(description, config, start);
    let request = ChatRequest {
        system_prompt: String::new(),
        history: vec![("user".to_string(), initiator.content.clone())],
        temperature: None,
        model_name: config.model_name.clone(),
        seed: config.seed,
    };
    let protocol = |error: ProtocolError, transcript: &Transcript| SessionError::Protocol {
        error,
        transcript: Box::new(transcript.clone()),
    };
    transcript
        .push(initiator)
        .map_err(|e| protocol(e.into(), &transcript))?;
    let response = call(provider, &request, &transcript)?;
    let reply = Message {
        seq: 1,
        role: AgentRole::RequirementsEngineer,
        phase: Phase::Drafting,
        content: response.content.clone(),
        tokens_in: response.tokens_in,
        tokens_out: response.tokens_out,
        timestamp: env.clock.now(),
    };
    transcript
        .push(reply)
        .map_err(|e| protocol(e.into(), &transcript))?;
    finish(SessionMode::Baseline, response.content, transcript, Termination::default())
}
