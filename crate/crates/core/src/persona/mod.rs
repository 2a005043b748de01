//! System prompts for the four model-backed agents, the initiator message
//! and the approval-phrase contract.

mod approval;
mod initiator;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{AgentRole, EthicsTheme, RunConfig};

pub use approval::{approval_matcher, ApprovalMatcher, EA_APPROVAL, QA_APPROVAL};
pub use initiator::{build_initiator, initiator_text, join_themes, number_word};

pub const QA_CHAIN_OF_THOUGHT: &str =
    "Think about each of the quality criteria carefully and report violations one point at a time, if present.";
pub const EA_CHAIN_OF_THOUGHT: &str =
    "Think about each of the ethical challenges and its sub-points carefully and solve it one step at a time.";

const QUALITY_CRITERIA: [&str; 4] = ["atomic", "minimal", "unambiguous", "estimable"];

const BUILTIN_SOURCES: [(&str, &str); 4] = [
    (
        "requirements_engineer.toml",
        include_str!("../../assets/personas/requirements_engineer.toml"),
    ),
    (
        "quality_assurance.toml",
        include_str!("../../assets/personas/quality_assurance.toml"),
    ),
    (
        "ethics_advocate.toml",
        include_str!("../../assets/personas/ethics_advocate.toml"),
    ),
    (
        "documentarian.toml",
        include_str!("../../assets/personas/documentarian.toml"),
    ),
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PersonaError {
    #[error("{0} has no persona")]
    UnknownRole(AgentRole),
    #[error("{0} is not a critic and has no approval phrase")]
    NotCritic(AgentRole),
    #[error("persona template {source_name}: {reason}")]
    Template { source_name: String, reason: String },
    #[error("persona for {role} is missing required fragment {fragment:?}")]
    MissingFragment { role: AgentRole, fragment: String },
    #[error("no persona template for {0}")]
    MissingTemplate(AgentRole),
}

/// A rendered system prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonaPrompt {
    pub role: AgentRole,
    pub text: String,
    pub verbatim_fragments: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    role: AgentRole,
    #[serde(default)]
    required_fragments: Vec<String>,
    template: String,
}

/// A persona template as loaded from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonaTemplate {
    pub role: AgentRole,
    pub required_fragments: Vec<String>,
    pub template: String,
}

/// Fragments the engine demands whatever the template file declares.
fn mandatory_fragments(role: AgentRole) -> Vec<&'static str> {
    match role {
        AgentRole::RequirementsEngineer => vec!["Acceptance Criteria", "[PLACEHOLDER"],
        AgentRole::QualityAssurance => vec![QA_CHAIN_OF_THOUGHT, QA_APPROVAL],
        AgentRole::EthicsAdvocate => vec![EA_CHAIN_OF_THOUGHT, EA_APPROVAL],
        AgentRole::Documentarian => vec![],
        AgentRole::Controller => vec![],
    }
}

const VARIABLES: [&str; 5] = ["themes", "topics", "criteria", "approval", "min_stories"];

fn render(template: &str, role: AgentRole, themes: &[EthicsTheme], config: &RunConfig) -> String {
    let topics = themes
        .iter()
        .map(|t| format!("- {}: {}", t.theme, t.topics.join(", ")))
        .collect::<Vec<_>>()
        .join("\n");
    let approval = match role {
        AgentRole::QualityAssurance => QA_APPROVAL,
        AgentRole::EthicsAdvocate => EA_APPROVAL,
        _ => "",
    };
    let criteria = join_themes(&QUALITY_CRITERIA);
    let names: Vec<&str> = themes.iter().map(|t| t.theme.name()).collect();
    template
        .replace("{{themes}}", &join_themes(&names))
        .replace("{{topics}}", &topics)
        .replace("{{criteria}}", &criteria)
        .replace("{{approval}}", approval)
        .replace("{{min_stories}}", &number_word(config.min_stories))
        .trim()
        .to_string()
}

fn check_variables(source_name: &str, template: &str) -> Result<(), PersonaError> {
    let mut rest = template;
    while let Some(open) = rest.find("{{") {
        let after = &rest[open + 2..];
        let Some(close) = after.find("}}") else {
            return Err(PersonaError::Template {
                source_name: source_name.to_string(),
                reason: "unterminated `{{`".into(),
            });
        };
        let name = after[..close].trim();
        if !VARIABLES.contains(&name) {
            return Err(PersonaError::Template {
                source_name: source_name.to_string(),
                reason: format!("unknown variable `{name}`"),
            });
        }
        rest = &after[close + 2..];
    }
    Ok(())
}

impl PersonaTemplate {
    /// Parses one template file and checks it against its fragment manifest
    /// by rendering it with the default configuration.
    pub fn parse(source_name: &str, text: &str) -> Result<Self, PersonaError> {
        let file: TemplateFile = toml::from_str(text).map_err(|e| PersonaError::Template {
            source_name: source_name.to_string(),
            reason: e.message().to_string(),
        })?;
        if !file.role.is_llm_agent() {
            return Err(PersonaError::UnknownRole(file.role));
        }
        check_variables(source_name, &file.template)?;
        let template = PersonaTemplate {
            role: file.role,
            required_fragments: file.required_fragments,
            template: file.template,
        };
        let cfg = RunConfig::default();
        template.build(&cfg.themes, &cfg)?;
        Ok(template)
    }

    fn fragments(&self) -> Vec<String> {
        let mut out: Vec<String> = mandatory_fragments(self.role)
            .into_iter()
            .map(str::to_string)
            .collect();
        for f in &self.required_fragments {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        out
    }

    pub fn build(&self, themes: &[EthicsTheme], config: &RunConfig) -> Result<PersonaPrompt, PersonaError> {
        let text = render(&self.template, self.role, themes, config);
        let mut fragments = self.fragments();
        if self.role == AgentRole::EthicsAdvocate {
            for t in themes {
                fragments.extend(t.topics.iter().cloned());
            }
        }
        if self.role == AgentRole::QualityAssurance {
            fragments.extend(QUALITY_CRITERIA.iter().map(|c| c.to_string()));
        }
        for f in &fragments {
            if !text.contains(f.as_str()) {
                return Err(PersonaError::MissingFragment {
                    role: self.role,
                    fragment: f.clone(),
                });
            }
        }
        Ok(PersonaPrompt {
            role: self.role,
            text,
            verbatim_fragments: fragments,
        })
    }
}

/// Holds one template per model-backed role.
#[derive(Debug, Clone)]
pub struct PersonaEngine {
    templates: BTreeMap<AgentRole, PersonaTemplate>,
}

impl PersonaEngine {
    /// The templates shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_sources(BUILTIN_SOURCES.iter().copied()).expect("builtin personas are valid")
    }

    /// Loads `<role>.toml` for each agent from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, PersonaError> {
        let mut sources = Vec::new();
        for role in AgentRole::LLM_AGENTS {
            let name = format!("{}.toml", role.slug());
            let path = dir.join(&name);
            let text = fs::read_to_string(&path).map_err(|e| PersonaError::Template {
                source_name: path.display().to_string(),
                reason: e.to_string(),
            })?;
            sources.push((path.display().to_string(), text));
        }
        Self::from_sources(sources.iter().map(|(n, t)| (n.as_str(), t.as_str())))
    }

    pub fn from_sources<'a>(sources: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, PersonaError> {
        let mut templates = BTreeMap::new();
        for (name, text) in sources {
            let t = PersonaTemplate::parse(name, text)?;
            if templates.insert(t.role, t).is_some() {
                return Err(PersonaError::Template {
                    source_name: name.to_string(),
                    reason: "duplicate role".into(),
                });
            }
        }
        for role in AgentRole::LLM_AGENTS {
            if !templates.contains_key(&role) {
                return Err(PersonaError::MissingTemplate(role));
            }
        }
        Ok(Self { templates })
    }

    pub fn template(&self, role: AgentRole) -> Option<&PersonaTemplate> {
        self.templates.get(&role)
    }

    pub fn build(
        &self,
        role: AgentRole,
        themes: &[EthicsTheme],
        config: &RunConfig,
    ) -> Result<PersonaPrompt, PersonaError> {
        if !role.is_llm_agent() {
            return Err(PersonaError::UnknownRole(role));
        }
        self.templates
            .get(&role)
            .ok_or(PersonaError::MissingTemplate(role))?
            .build(themes, config)
    }
}

/// Builds a persona from the shipped templates.
pub fn build_persona(
    role: AgentRole,
    themes: &[EthicsTheme],
    config: &RunConfig,
) -> Result<PersonaPrompt, PersonaError> {
    PersonaEngine::builtin().build(role, themes, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_taxonomy;
    use proptest::prelude::*;

    fn default_prompt(role: AgentRole) -> PersonaPrompt {
        let cfg = RunConfig::default();
        build_persona(role, &cfg.themes, &cfg).unwrap()
    }

    #[test]
    fn qa_carries_chain_of_thought() {
        let p = default_prompt(AgentRole::QualityAssurance);
        assert!(p
            .verbatim_fragments
            .iter()
            .any(|f| f.contains("report violations one point at a time")));
        assert!(p.text.contains(QA_CHAIN_OF_THOUGHT));
        for c in ["Atomic", "Minimal", "Unambiguous", "Estimable"] {
            assert!(p.text.contains(c), "{c}");
        }
        assert!(p.text.contains(QA_APPROVAL));
    }

    #[test]
    fn ea_carries_chain_of_thought_and_topics() {
        let p = default_prompt(AgentRole::EthicsAdvocate);
        assert!(p
            .verbatim_fragments
            .iter()
            .any(|f| f.contains("solve it one step at a time")));
        for topic in crate::model::all_topics(&default_taxonomy()) {
            assert!(p.text.contains(topic), "{topic}");
        }
        assert!(p.text.contains(EA_APPROVAL));
    }

    #[test]
    fn re_and_doc_duties() {
        let re = default_prompt(AgentRole::RequirementsEngineer);
        assert!(re.text.contains("Acceptance Criteria:"));
        assert!(re.text.contains("[PLACEHOLDER: <what is needed>]"));
        assert!(re.text.contains("Transparency, Fairness, and Data"));
        let doc = default_prompt(AgentRole::Documentarian);
        assert!(doc.text.contains("Do not add, remove, merge or reword requirements."));
    }

    #[test]
    fn every_persona_guards_against_role_bleed() {
        for role in AgentRole::LLM_AGENTS {
            let p = default_prompt(role);
            assert!(p.text.contains("Never write messages on behalf of other agents"), "{role}");
            assert!(!p.text.contains("{{"), "{role}");
        }
    }

    #[test]
    fn controller_has_no_persona() {
        let cfg = RunConfig::default();
        assert_eq!(
            build_persona(AgentRole::Controller, &cfg.themes, &cfg),
            Err(PersonaError::UnknownRole(AgentRole::Controller))
        );
    }

    #[test]
    fn template_missing_fragment_rejected_at_load() {
        let src = r#"
role = "quality_assurance"
template = "Review the requirements. {{approval}}"
"#;
        let err = PersonaTemplate::parse("qa.toml", src).unwrap_err();
        assert!(matches!(err, PersonaError::MissingFragment { .. }), "{err}");
    }

    #[test]
    fn template_declared_fragment_enforced() {
        let src = r#"
role = "documentarian"
required_fragments = ["Output only the document."]
template = "Assemble the document."
"#;
        let err = PersonaTemplate::parse("doc.toml", src).unwrap_err();
        assert_eq!(
            err,
            PersonaError::MissingFragment {
                role: AgentRole::Documentarian,
                fragment: "Output only the document.".into()
            }
        );
    }

    #[test]
    fn unknown_variable_rejected() {
        let src = r#"
role = "documentarian"
template = "Assemble {{documents}}."
"#;
        assert!(matches!(
            PersonaTemplate::parse("doc.toml", src),
            Err(PersonaError::Template { .. })
        ));
    }

    #[test]
    fn load_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (name, text) in BUILTIN_SOURCES {
            std::fs::write(dir.path().join(name), text).unwrap();
        }
        let engine = PersonaEngine::load_dir(dir.path()).unwrap();
        let cfg = RunConfig::default();
        for role in AgentRole::LLM_AGENTS {
            assert_eq!(
                engine.build(role, &cfg.themes, &cfg).unwrap(),
                build_persona(role, &cfg.themes, &cfg).unwrap()
            );
        }
        std::fs::remove_file(dir.path().join("documentarian.toml")).unwrap();
        assert!(PersonaEngine::load_dir(dir.path()).is_err());
    }

    #[test]
    fn custom_taxonomy_is_enumerated() {
        let mut cfg = RunConfig::default();
        cfg.themes.truncate(1);
        let p = build_persona(AgentRole::EthicsAdvocate, &cfg.themes, &cfg).unwrap();
        assert!(p.text.contains("explainability"));
        assert!(!p.text.contains("privacy"));
    }

    proptest! {
        #[test]
        fn personas_are_pure(min in 1u32..50, temp in 0.0f64..2.0, idx in 0usize..4) {
            let role = AgentRole::LLM_AGENTS[idx];
            let cfg = RunConfig { min_stories: min, temperature: temp, ..RunConfig::default() };
            let a = build_persona(role, &cfg.themes, &cfg).unwrap();
            let b = build_persona(role, &cfg.themes, &cfg).unwrap();
            prop_assert_eq!(&a, &b);
            for f in &a.verbatim_fragments {
                prop_assert!(a.text.contains(f.as_str()));
            }
        }
    }
}
