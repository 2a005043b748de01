//! Shared domain vocabulary: descriptions, themes, agents, messages,
//! stories, requirements and run configuration.

mod config;
mod story;
mod taxonomy;
mod transcript;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ConfigError, RunConfig, DEFAULT_ENDPOINT, DEFAULT_MODEL};
pub use story::{AcceptanceCriterion, DiscreteRequirement, Placeholder, Span, UserStory};
pub use taxonomy::{
    all_topics, default_taxonomy, taxonomy_from_toml, taxonomy_to_toml, theme_of,
    validate_taxonomy, EthicsTheme, TaxonomyError, Theme, DEFAULT_TAXONOMY_TOML,
};
pub use transcript::{Message, Transcript, TranscriptError};

/// Prose description of the system requirements are elicited for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDescription {
    title: String,
    body: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("system description body is empty")]
pub struct EmptyDescription;

impl SystemDescription {
    pub fn new(title: impl Into<String>, body: impl Into<String>) -> Result<Self, EmptyDescription> {
        let body = body.into();
        if body.trim().is_empty() {
            return Err(EmptyDescription);
        }
        Ok(Self {
            title: title.into(),
            body: body.trim().to_string(),
        })
    }

    /// Reads a description from text: a leading `# ` heading becomes the
    /// title, everything else the body.
    pub fn from_markdown(text: &str) -> Result<Self, EmptyDescription> {
        let trimmed = text.trim_start();
        match trimmed.split_once('\n') {
            Some((first, rest)) if first.starts_with("# ") => {
                Self::new(first.trim_start_matches('#').trim(), rest)
            }
            None if trimmed.starts_with("# ") => Err(EmptyDescription),
            _ => Self::new("", trimmed),
        }
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn body(&self) -> &str {
        &self.body
    }
}

/// The participants of a session. Only the first four produce model text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    RequirementsEngineer,
    QualityAssurance,
    EthicsAdvocate,
    Documentarian,
    Controller,
}

impl AgentRole {
    pub const ALL: [AgentRole; 5] = [
        AgentRole::RequirementsEngineer,
        AgentRole::QualityAssurance,
        AgentRole::EthicsAdvocate,
        AgentRole::Documentarian,
        AgentRole::Controller,
    ];

    pub const LLM_AGENTS: [AgentRole; 4] = [
        AgentRole::RequirementsEngineer,
        AgentRole::QualityAssurance,
        AgentRole::EthicsAdvocate,
        AgentRole::Documentarian,
    ];

    pub fn is_llm_agent(self) -> bool {
        self != AgentRole::Controller
    }

    pub fn display_name(self) -> &'static str {
        match self {
            AgentRole::RequirementsEngineer => "Requirements Engineer",
            AgentRole::QualityAssurance => "Quality Assurance",
            AgentRole::EthicsAdvocate => "Ethics Advocate",
            AgentRole::Documentarian => "Documentation Assistant",
            AgentRole::Controller => "Controller",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            AgentRole::RequirementsEngineer => "requirements_engineer",
            AgentRole::QualityAssurance => "quality_assurance",
            AgentRole::EthicsAdvocate => "ethics_advocate",
            AgentRole::Documentarian => "documentarian",
            AgentRole::Controller => "controller",
        }
    }
}

impl fmt::Display for AgentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Pipeline phases, in the order a session moves through them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Drafting,
    QualityReview,
    EthicsReview,
    Documentation,
    Done,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Drafting => "drafting",
            Phase::QualityReview => "quality_review",
            Phase::EthicsReview => "ethics_review",
            Phase::Documentation => "documentation",
            Phase::Done => "done",
        };
        f.write_str(s)
    }
}
