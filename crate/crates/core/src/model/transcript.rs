use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AgentRole, Phase, RunConfig};

/// One utterance in a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub seq: usize,
    pub role: AgentRole,
    pub phase: Phase,
    pub content: String,
    #[serde(default)]
    pub tokens_in: u32,
    #[serde(default)]
    pub tokens_out: u32,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("message {seq} has empty content")]
    EmptyContent { seq: usize },
    #[error("expected seq {expected}, got {got}")]
    SequenceGap { expected: usize, got: usize },
    #[error("message {seq} moves phase back from {from} to {to}")]
    PhaseRegression { seq: usize, from: Phase, to: Phase },
    #[error("first message must come from the controller")]
    NotInitiator,
}

/// The ordered record of a session.
///
/// Sequence numbers are gapless from zero, the first message is the
/// controller's initiator, and phase tags never decrease.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    pub config_snapshot: RunConfig,
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new(session_id: impl Into<String>, config_snapshot: RunConfig) -> Self {
        Self {
            session_id: session_id.into(),
            config_snapshot,
            messages: Vec::new(),
        }
    }

    /// Rebuilds a transcript from stored messages, checking every invariant.
    pub fn from_messages(
        session_id: impl Into<String>,
        config_snapshot: RunConfig,
        messages: Vec<Message>,
    ) -> Result<Self, TranscriptError> {
        let mut t = Self::new(session_id, config_snapshot);
        for m in messages {
            t.push(m)?;
        }
        Ok(t)
    }

    pub fn next_seq(&self) -> usize {
        self.messages.len()
    }

    pub fn last_phase(&self) -> Option<Phase> {
        self.messages.last().map(|m| m.phase)
    }

    pub fn push(&mut self, message: Message) -> Result<(), TranscriptError> {
        let expected = self.next_seq();
        if message.seq != expected {
            return Err(TranscriptError::SequenceGap {
                expected,
                got: message.seq,
            });
        }
        if message.content.trim().is_empty() {
            return Err(TranscriptError::EmptyContent { seq: message.seq });
        }
        if expected == 0 && message.role != AgentRole::Controller {
            return Err(TranscriptError::NotInitiator);
        }
        if let Some(prev) = self.last_phase() {
            if message.phase < prev {
                return Err(TranscriptError::PhaseRegression {
                    seq: message.seq,
                    from: prev,
                    to: message.phase,
                });
            }
        }
        self.messages.push(message);
        Ok(())
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Number of messages produced by model-backed agents.
    pub fn agent_turns(&self) -> usize {
        self.messages.iter().filter(|m| m.role.is_llm_agent()).count()
    }

    /// One JSON object per line, in sequence order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&serde_json::to_string(m).expect("message serializes"));
            out.push('\n');
        }
        out
    }

    pub fn messages_from_jsonl(text: &str) -> Result<Vec<Message>, serde_json::Error> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect()
    }
}
