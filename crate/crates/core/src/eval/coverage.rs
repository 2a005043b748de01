use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::RequirementRecord;
use crate::model::{all_topics, EthicsTheme};

pub const DEFAULT_TOPIC_KEYWORDS: &str = include_str!("../../assets/topic_keywords.toml");
pub const UNCLASSIFIED: &str = "unclassified";

#[derive(Debug, Error)]
pub enum TopicLexiconError {
    #[error("topic lexicon: {0}")]
    Parse(String),
    #[error("topic lexicon: empty keyword for {0}")]
    EmptyKeyword(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum WordPattern {
    Exact(String),
    Stem(String),
}

impl WordPattern {
    fn matches(&self, word: &str) -> bool {
        match self {
            WordPattern::Exact(w) => w == word,
            WordPattern::Stem(s) => word.starts_with(s.as_str()),
        }
    }
}

/// Keywords per topic: words, `stem*` prefixes or multi-word phrases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicLexicon {
    topics: BTreeMap<String, Vec<Vec<WordPattern>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    topics: BTreeMap<String, Vec<String>>,
}

impl Default for TopicLexicon {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TOPIC_KEYWORDS).expect("default topic lexicon is valid")
    }
}

fn tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !(c.is_alphanumeric() || c == '-'))
        .map(|w| w.trim_matches('-'))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

impl TopicLexicon {
    pub fn from_toml(text: &str) -> Result<Self, TopicLexiconError> {
        let file: LexiconFile = toml::from_str(text).map_err(|e| TopicLexiconError::Parse(e.message().to_string()))?;
        let mut topics = BTreeMap::new();
        for (topic, keywords) in file.topics {
            let mut patterns = Vec::new();
            for k in keywords {
                let phrase: Vec<WordPattern> = k
                    .split_whitespace()
                    .map(|w| {
                        let w = w.to_lowercase();
                        match w.strip_suffix('*') {
                            Some(stem) => WordPattern::Stem(stem.to_string()),
                            None => WordPattern::Exact(w),
                        }
                    })
                    .collect();
                if phrase.is_empty() || phrase.iter().any(|p| matches!(p, WordPattern::Stem(s) if s.is_empty())) {
                    return Err(TopicLexiconError::EmptyKeyword(topic));
                }
                patterns.push(phrase);
            }
            topics.insert(topic.to_lowercase(), patterns);
        }
        Ok(Self { topics })
    }

    /// Topics whose keywords occur in `text`.
    pub fn topics_of(&self, text: &str) -> Vec<&str> {
        let words = tokens(text);
        self.topics
            .iter()
            .filter(|(_, phrases)| {
                phrases.iter().any(|phrase| {
                    words
                        .windows(phrase.len())
                        .any(|win| win.iter().zip(phrase).all(|(w, p)| p.matches(w)))
                })
            })
            .map(|(t, _)| t.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Taxonomy topics in taxonomy order with the ids that hit them.
    pub topics: Vec<(String, Vec<String>)>,
    pub uncovered: Vec<String>,
    /// Ids matching no taxonomy topic.
    pub unclassified: Vec<String>,
}

impl CoverageReport {
    pub fn hits(&self, topic: &str) -> usize {
        self.topics
            .iter()
            .find(|(t, _)| t == topic)
            .map_or(0, |(_, ids)| ids.len())
    }

    pub fn to_text(&self) -> String {
        let width = self.topics.iter().map(|(t, _)| t.len()).max().unwrap_or(0).max(UNCLASSIFIED.len());
        let mut out = String::new();
        for (t, ids) in &self.topics {
            out.push_str(&format!("{t:<width$}  {:>3}\n", ids.len()));
        }
        out.push_str(&format!("{UNCLASSIFIED:<width$}  {:>3}\n", self.unclassified.len()));
        if !self.uncovered.is_empty() {
            out.push_str(&format!("uncovered: {}\n", self.uncovered.join(", ")));
        }
        out
    }
}

/// Counts requirement hits per taxonomy topic. A requirement may hit
/// several topics; one hitting none is listed as unclassified.
pub fn theme_coverage(
    requirements: &[RequirementRecord],
    taxonomy: &[EthicsTheme],
    lexicon: &TopicLexicon,
) -> CoverageReport {
    let topics: Vec<String> = all_topics(taxonomy).into_iter().map(str::to_string).collect();
    let mut hits: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut unclassified = Vec::new();
    for r in requirements {
        let found: Vec<&str> = lexicon
            .topics_of(&r.text)
            .into_iter()
            .filter(|t| topics.iter().any(|x| x == t))
            .collect();
        if found.is_empty() {
            unclassified.push(r.id.clone());
        }
        for t in found {
            hits.entry(t).or_default().push(r.id.clone());
        }
    }
    let rows: Vec<(String, Vec<String>)> = topics
        .iter()
        .map(|t| (t.clone(), hits.remove(t.as_str()).unwrap_or_default()))
        .collect();
    let uncovered = rows.iter().filter(|(_, ids)| ids.is_empty()).map(|(t, _)| t.clone()).collect();
    CoverageReport {
        topics: rows,
        uncovered,
        unclassified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_taxonomy;

    fn rec(id: &str, text: &str) -> RequirementRecord {
        RequirementRecord {
            id: id.into(),
            text: text.into(),
            story_id: "US-1".into(),
            criterion_id: None,
            placeholders: vec![],
            themes: vec![],
        }
    }

    #[test]
    fn default_lexicon_covers_taxonomy() {
        let lex = TopicLexicon::default();
        for t in all_topics(&default_taxonomy()) {
            assert!(lex.topics.contains_key(t), "{t}");
        }
    }

    #[test]
    fn log_of_mistranslations_is_traceability() {
        let r = rec("R-1", "The system shall provide a log of all mistranslated instances");
        let c = theme_coverage(&[r], &default_taxonomy(), &TopicLexicon::default());
        assert_eq!(c.hits("traceability"), 1);
    }

    #[test]
    fn empty_set_leaves_everything_uncovered() {
        let c = theme_coverage(&[], &default_taxonomy(), &TopicLexicon::default());
        assert_eq!(c.uncovered.len(), 12);
        assert!(c.unclassified.is_empty());
    }

    #[test]
    fn no_match_is_unclassified() {
        let r = rec("R-9", "The app shall use a blue theme");
        let c = theme_coverage(&[r], &default_taxonomy(), &TopicLexicon::default());
        assert_eq!(c.unclassified, ["R-9"]);
        assert!(c.to_text().contains("unclassified"));
    }

    #[test]
    fn phrases_and_stems() {
        let lex = TopicLexicon::from_toml(
            "[topics]\n\"privacy\" = [\"consent*\", \"data subject\"]\n",
        )
        .unwrap();
        assert_eq!(lex.topics_of("Users give Consent first"), ["privacy"]);
        assert_eq!(lex.topics_of("the data subject may object"), ["privacy"]);
        assert!(lex.topics_of("data and subject").is_empty());
        assert!(TopicLexicon::from_toml("[topics]\n\"x\" = [\"*\"]\n").is_err());
    }
}
