use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AgentRole, Message, Phase, Transcript, TranscriptError};
use crate::persona::approval_matcher;

/// How a review phase ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseOutcome {
    Approved,
    CycleLimit,
}

/// Outcome per review phase; `None` for phases that never ran.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Termination {
    pub quality: Option<PhaseOutcome>,
    pub ethics: Option<PhaseOutcome>,
}

impl Termination {
    pub fn hit_cycle_limit(&self) -> bool {
        self.quality == Some(PhaseOutcome::CycleLimit) || self.ethics == Some(PhaseOutcome::CycleLimit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Turn {
    Initiator,
    Speaker(AgentRole),
    /// The controller asked the engineer to reformat; `resume` speaks next.
    Reformatting { resume: AgentRole },
    Finished,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("session already finished")]
    Finished,
    #[error("expected a message from {expected} in {phase}, got one from {got}")]
    UnexpectedRole {
        expected: AgentRole,
        got: AgentRole,
        phase: Phase,
    },
    #[error("message tagged {got} while the session is in {expected}")]
    PhaseMismatch { expected: Phase, got: Phase },
    #[error("a reformat request is not allowed here")]
    ReformatNotAllowed,
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
}

/// The controller's view of a running session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub phase: Phase,
    pub current_draft: String,
    pub qa_critiques_used: u32,
    pub ea_critiques_used: u32,
    pub transcript: Transcript,
    max_cycles: u32,
    turn: Turn,
    termination: Termination,
    final_document: Option<String>,
    reformatted: Vec<Phase>,
}

impl SessionState {
    /// A fresh state over an empty transcript; the cycle limit comes from
    /// the transcript's config snapshot.
    pub fn new(transcript: Transcript) -> Self {
        let max_cycles = transcript.config_snapshot.max_critique_cycles;
        Self {
            phase: Phase::Drafting,
            current_draft: String::new(),
            qa_critiques_used: 0,
            ea_critiques_used: 0,
            transcript,
            max_cycles,
            turn: Turn::Initiator,
            termination: Termination::default(),
            final_document: None,
            reformatted: Vec::new(),
        }
    }

    pub fn max_cycles(&self) -> u32 {
        self.max_cycles
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn final_document(&self) -> Option<&str> {
        self.final_document.as_deref()
    }

    pub fn is_finished(&self) -> bool {
        self.turn == Turn::Finished
    }

    /// Who must speak next; `None` once the session is done.
    pub fn expected_speaker(&self) -> Option<AgentRole> {
        match self.turn {
            Turn::Initiator => Some(AgentRole::Controller),
            Turn::Speaker(r) => Some(r),
            Turn::Reformatting { .. } => Some(AgentRole::RequirementsEngineer),
            Turn::Finished => None,
        }
    }

    pub fn provider_calls(&self) -> usize {
        self.transcript.agent_turns()
    }

    pub fn max_provider_calls(&self) -> usize {
        2 + 4 * self.max_cycles as usize
    }

    /// Provider calls still possible if every critic keeps critiquing.
    pub fn worst_case_remaining(&self) -> usize {
        self.remaining_for(self.turn)
    }

    fn remaining_for(&self, turn: Turn) -> usize {
        let m = self.max_cycles as usize;
        let qa = self.qa_critiques_used as usize;
        let ea = self.ea_critiques_used as usize;
        let ethics_from = |used: usize| 2 * (m - used) + 1;
        let quality_from = |used: usize| 2 * (m - used) + 2 * m + 1;
        match turn {
            Turn::Initiator => 2 + 4 * m,
            Turn::Finished => 0,
            Turn::Reformatting { resume } => 1 + self.remaining_for(Turn::Speaker(resume)),
            Turn::Speaker(role) => match (role, self.phase) {
                (AgentRole::RequirementsEngineer, Phase::Drafting) => 1 + quality_from(0),
                (AgentRole::RequirementsEngineer, Phase::QualityReview) if qa == m => 1 + ethics_from(0),
                (AgentRole::RequirementsEngineer, Phase::QualityReview) => 1 + quality_from(qa),
                (AgentRole::RequirementsEngineer, Phase::EthicsReview) if ea == m => 2,
                (AgentRole::RequirementsEngineer, Phase::EthicsReview) => 1 + ethics_from(ea),
                (AgentRole::QualityAssurance, _) => quality_from(qa),
                (AgentRole::EthicsAdvocate, _) => ethics_from(ea),
                _ => 1,
            },
        }
    }

    /// A reformat request may follow an engineer message once per phase,
    /// provided the extra call cannot push the session past its call bound.
    pub fn can_request_reformat(&self) -> bool {
        let after_engineer = self
            .transcript
            .messages()
            .last()
            .is_some_and(|m| m.role == AgentRole::RequirementsEngineer);
        let Turn::Speaker(resume) = self.turn else {
            return false;
        };
        after_engineer
            && resume != AgentRole::RequirementsEngineer
            && !self.reformatted.contains(&self.phase)
            && self.provider_calls() + self.remaining_for(Turn::Reformatting { resume })
                <= self.max_provider_calls()
    }

    /// Applies one message. Nothing changes if the message is rejected.
    pub fn apply(&mut self, message: Message) -> Result<(), ProtocolError> {
        if self.turn == Turn::Finished {
            return Err(ProtocolError::Finished);
        }
        if message.phase != self.phase {
            return Err(ProtocolError::PhaseMismatch {
                expected: self.phase,
                got: message.phase,
            });
        }
        let expected = self.expected_speaker().expect("unfinished session has a speaker");
        let reformat = message.role == AgentRole::Controller && self.turn != Turn::Initiator;
        if reformat {
            if !self.can_request_reformat() {
                return Err(ProtocolError::ReformatNotAllowed);
            }
        } else if message.role != expected {
            return Err(ProtocolError::UnexpectedRole {
                expected,
                got: message.role,
                phase: self.phase,
            });
        }
        let approved = match message.role {
            AgentRole::QualityAssurance | AgentRole::EthicsAdvocate => approval_matcher(message.role)
                .expect("critic role")
                .matches(&message.content),
            _ => false,
        };
        let content = message.content.clone();
        self.transcript.push(message)?;

        let m = self.max_cycles;
        match (self.turn, expected) {
            (Turn::Initiator, _) => self.turn = Turn::Speaker(AgentRole::RequirementsEngineer),
            (Turn::Speaker(resume), _) if reformat => {
                self.reformatted.push(self.phase);
                self.turn = Turn::Reformatting { resume };
            }
            (Turn::Reformatting { resume }, _) => {
                self.current_draft = content;
                self.turn = Turn::Speaker(resume);
            }
            (Turn::Speaker(_), AgentRole::RequirementsEngineer) => {
                self.current_draft = content;
                match self.phase {
                    Phase::Drafting => self.enter(Phase::QualityReview, AgentRole::QualityAssurance),
                    Phase::QualityReview if self.qa_critiques_used >= m => {
                        self.termination.quality = Some(PhaseOutcome::CycleLimit);
                        self.enter(Phase::EthicsReview, AgentRole::EthicsAdvocate);
                    }
                    Phase::QualityReview => self.turn = Turn::Speaker(AgentRole::QualityAssurance),
                    Phase::EthicsReview if self.ea_critiques_used >= m => {
                        self.termination.ethics = Some(PhaseOutcome::CycleLimit);
                        self.enter(Phase::Documentation, AgentRole::Documentarian);
                    }
                    Phase::EthicsReview => self.turn = Turn::Speaker(AgentRole::EthicsAdvocate),
                    Phase::Documentation | Phase::Done => unreachable!("engineer never speaks here"),
                }
            }
            (Turn::Speaker(_), AgentRole::QualityAssurance) => {
                if approved {
                    self.termination.quality = Some(PhaseOutcome::Approved);
                    self.enter(Phase::EthicsReview, AgentRole::EthicsAdvocate);
                } else {
                    self.qa_critiques_used += 1;
                    self.turn = Turn::Speaker(AgentRole::RequirementsEngineer);
                }
            }
            (Turn::Speaker(_), AgentRole::EthicsAdvocate) => {
                if approved {
                    self.termination.ethics = Some(PhaseOutcome::Approved);
                    self.enter(Phase::Documentation, AgentRole::Documentarian);
                } else {
                    self.ea_critiques_used += 1;
                    self.turn = Turn::Speaker(AgentRole::RequirementsEngineer);
                }
            }
            (Turn::Speaker(_), AgentRole::Documentarian) => {
                self.final_document = Some(content);
                self.phase = Phase::Done;
                self.turn = Turn::Finished;
            }
            (Turn::Speaker(_), AgentRole::Controller) | (Turn::Finished, _) => {
                unreachable!("rejected above")
            }
        }
        Ok(())
    }

    fn enter(&mut self, phase: Phase, speaker: AgentRole) {
        self.phase = phase;
        self.turn = Turn::Speaker(speaker);
    }
}

/// Pure transition: consumes a state and one message, returns the next state.
pub fn step(mut state: SessionState, incoming: Message) -> Result<SessionState, ProtocolError> {
    state.apply(incoming)?;
    Ok(state)
}
