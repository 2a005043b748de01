//! Ethics themes and the topic taxonomy the ethics advocate works from.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The three ethics themes covered by the elicitation dialogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theme {
    Transparency,
    Fairness,
    Data,
}

impl Theme {
    pub fn name(self) -> &'static str {
        match self {
            Theme::Transparency => "Transparency",
            Theme::Fairness => "Fairness",
            Theme::Data => "Data",
        }
    }
}

impl fmt::Display for Theme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A theme together with the topic labels grouped under it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EthicsTheme {
    pub theme: Theme,
    pub topics: Vec<String>,
}

impl EthicsTheme {
    pub fn new(theme: Theme, topics: &[&str]) -> Self {
        Self {
            theme,
            topics: topics.iter().map(|t| t.to_string()).collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("taxonomy has no themes")]
    Empty,
    #[error("theme {0} listed more than once")]
    DuplicateTheme(Theme),
    #[error("theme {0} has no topics")]
    EmptyTheme(Theme),
    #[error("topic {0:?} appears more than once")]
    DuplicateTopic(String),
    #[error("topic label is blank")]
    BlankTopic,
    #[error("malformed taxonomy file: {0}")]
    Parse(String),
}

/// The twelve-topic taxonomy: six transparency topics, three fairness
/// topics and three data topics, in a fixed order.
pub fn default_taxonomy() -> Vec<EthicsTheme> {
    vec![
        EthicsTheme::new(
            Theme::Transparency,
            &[
                "internal transparency",
                "external transparency",
                "explainability",
                "communication",
                "documentation",
                "traceability",
            ],
        ),
        EthicsTheme::new(
            Theme::Fairness,
            &["system reliability", "accessibility", "inclusion"],
        ),
        EthicsTheme::new(Theme::Data, &["privacy", "data quality", "access to data"]),
    ]
}

/// Checks that themes are distinct, non-empty and that topic labels are unique.
pub fn validate_taxonomy(themes: &[EthicsTheme]) -> Result<(), TaxonomyError> {
    if themes.is_empty() {
        return Err(TaxonomyError::Empty);
    }
    let mut seen_themes = HashSet::new();
    let mut seen_topics = HashSet::new();
    for t in themes {
        if !seen_themes.insert(t.theme) {
            return Err(TaxonomyError::DuplicateTheme(t.theme));
        }
        if t.topics.is_empty() {
            return Err(TaxonomyError::EmptyTheme(t.theme));
        }
        for topic in &t.topics {
            if topic.trim().is_empty() {
                return Err(TaxonomyError::BlankTopic);
            }
            if !seen_topics.insert(topic.to_lowercase()) {
                return Err(TaxonomyError::DuplicateTopic(topic.clone()));
            }
        }
    }
    Ok(())
}

/// All topic labels in taxonomy order.
pub fn all_topics(themes: &[EthicsTheme]) -> Vec<&str> {
    themes
        .iter()
        .flat_map(|t| t.topics.iter().map(String::as_str))
        .collect()
}

/// The theme a topic label belongs to, if any.
pub fn theme_of(themes: &[EthicsTheme], topic: &str) -> Option<Theme> {
    themes
        .iter()
        .find(|t| t.topics.iter().any(|x| x.eq_ignore_ascii_case(topic)))
        .map(|t| t.theme)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxonomyFile {
    themes: Vec<EthicsTheme>,
}

/// Parses a taxonomy file (`[[themes]]` tables with `theme` and `topics`).
pub fn taxonomy_from_toml(text: &str) -> Result<Vec<EthicsTheme>, TaxonomyError> {
    let file: TaxonomyFile =
        toml::from_str(text).map_err(|e| TaxonomyError::Parse(e.to_string()))?;
    validate_taxonomy(&file.themes)?;
    Ok(file.themes)
}

pub fn taxonomy_to_toml(themes: &[EthicsTheme]) -> String {
    toml::to_string(&TaxonomyFile {
        themes: themes.to_vec(),
    })
    .expect("taxonomy serializes")
}

/// The taxonomy file shipped with the crate.
pub const DEFAULT_TAXONOMY_TOML: &str = include_str!("../../assets/taxonomy.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_twelve_unique_topics() {
        let tax = default_taxonomy();
        assert_eq!(tax.len(), 3);
        let topics = all_topics(&tax);
        assert_eq!(topics.len(), 12);
        let unique: HashSet<_> = topics.iter().collect();
        assert_eq!(unique.len(), 12);
        assert!(validate_taxonomy(&tax).is_ok());
    }

    #[test]
    fn default_grouping() {
        let tax = default_taxonomy();
        assert_eq!(theme_of(&tax, "traceability"), Some(Theme::Transparency));
        assert_eq!(theme_of(&tax, "inclusion"), Some(Theme::Fairness));
        assert_eq!(theme_of(&tax, "Access to Data"), Some(Theme::Data));
        assert_eq!(theme_of(&tax, "sustainability"), None);
    }

    #[test]
    fn deterministic() {
        assert_eq!(default_taxonomy(), default_taxonomy());
    }

    #[test]
    fn shipped_file_matches_default() {
        assert_eq!(
            taxonomy_from_toml(DEFAULT_TAXONOMY_TOML).unwrap(),
            default_taxonomy()
        );
    }

    #[test]
    fn toml_round_trip() {
        let tax = default_taxonomy();
        assert_eq!(taxonomy_from_toml(&taxonomy_to_toml(&tax)).unwrap(), tax);
    }

    #[test]
    fn rejects_duplicate_topic() {
        let tax = vec![
            EthicsTheme::new(Theme::Transparency, &["privacy"]),
            EthicsTheme::new(Theme::Data, &["Privacy"]),
        ];
        assert_eq!(
            validate_taxonomy(&tax),
            Err(TaxonomyError::DuplicateTopic("Privacy".into()))
        );
    }

    #[test]
    fn rejects_duplicate_theme_and_empty() {
        assert_eq!(validate_taxonomy(&[]), Err(TaxonomyError::Empty));
        let tax = vec![
            EthicsTheme::new(Theme::Data, &["a"]),
            EthicsTheme::new(Theme::Data, &["b"]),
        ];
        assert_eq!(
            validate_taxonomy(&tax),
            Err(TaxonomyError::DuplicateTheme(Theme::Data))
        );
    }
}
