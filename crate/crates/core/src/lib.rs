//! Multi-agent elicitation of ethics requirements as user stories, with a
//! local quality linter and a coverage evaluation harness.
//!
//! A session runs four model-backed agents through a fixed pipeline:
//! the requirements engineer drafts, quality assurance and the ethics
//! advocate each critique for a bounded number of cycles, and the
//! documentation assistant assembles the final document.

pub mod codec;
pub mod eval;
pub mod lint;
pub mod model;
pub mod orchestrator;
pub mod persona;
pub mod provider;

pub use model::{
    default_taxonomy, AcceptanceCriterion, AgentRole, ConfigError, DiscreteRequirement, EthicsTheme, Message,
    Phase, Placeholder, RunConfig, Span, SystemDescription, Theme, Transcript, UserStory,
};
pub use orchestrator::{
    run_baseline, run_session, PhaseOutcome, SessionError, SessionResult, SessionState, Termination,
};
pub use provider::{ChatProvider, ChatRequest, ChatResponse, ProviderError, ProviderErrorKind};
