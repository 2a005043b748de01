use crate::model::AgentRole;

use super::PersonaError;

pub const QA_APPROVAL: &str = "The requirements are approved from a quality point of view.";
pub const EA_APPROVAL: &str = "The requirements are approved from an ethics point of view.";

const EA_VARIANT: &str = "The requirements are approved from a ethics point of view.";

/// Lowercases, turns punctuation and markup into spaces and collapses runs
/// of whitespace, so "**Approved**\nfrom" and "approved from" compare equal.
fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push(' ');
    let mut space = true;
    for c in text.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
            space = false;
        } else if !space {
            out.push(' ');
            space = true;
        }
    }
    if !space {
        out.push(' ');
    }
    out
}

/// Substring predicate for a critic's approval sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalMatcher {
    role: AgentRole,
    phrases: Vec<String>,
}

impl ApprovalMatcher {
    pub fn role(&self) -> AgentRole {
        self.role
    }

    pub fn matches(&self, text: &str) -> bool {
        let hay = normalize(text);
        self.phrases.iter().any(|p| hay.contains(p.as_str()))
    }
}

pub fn approval_matcher(role: AgentRole) -> Result<ApprovalMatcher, PersonaError> {
    let phrases: &[&str] = match role {
        AgentRole::QualityAssurance => &[QA_APPROVAL],
        AgentRole::EthicsAdvocate => &[EA_APPROVAL, EA_VARIANT],
        other => return Err(PersonaError::NotCritic(other)),
    };
    Ok(ApprovalMatcher {
        role,
        phrases: phrases.iter().map(|p| normalize(p)).collect(),
    })
}
