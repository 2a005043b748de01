use serde::{Deserialize, Serialize};

use crate::codec::extract_placeholders;

/// Byte range into a piece of text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }

    pub fn within(&self, text: &str) -> bool {
        self.end <= text.len() && text.is_char_boundary(self.start) && text.is_char_boundary(self.end)
    }
}

/// A `[PLACEHOLDER]` tag marking a value left for human stakeholders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placeholder {
    pub span: Span,
    pub raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A testable condition attached to a story. Placeholders are always
/// re-derived from the text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "CriterionFields")]
pub struct AcceptanceCriterion {
    pub id: String,
    text: String,
    placeholders: Vec<Placeholder>,
}

#[derive(Deserialize)]
struct CriterionFields {
    id: String,
    text: String,
}

impl From<CriterionFields> for AcceptanceCriterion {
    fn from(f: CriterionFields) -> Self {
        AcceptanceCriterion::new(f.id, f.text)
    }
}

impl AcceptanceCriterion {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let placeholders = extract_placeholders(&text).placeholders;
        Self {
            id: id.into(),
            text,
            placeholders,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn placeholders(&self) -> &[Placeholder] {
        &self.placeholders
    }
}

/// "As a <role>, I want <want>, so that <benefit>" plus its criteria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserStory {
    pub id: String,
    pub role_clause: String,
    pub want_clause: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benefit_clause: Option<String>,
    pub criteria: Vec<AcceptanceCriterion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub themes: Vec<String>,
}

impl UserStory {
    /// The story sentence in canonical form, article chosen by the role.
    pub fn sentence(&self) -> String {
        let article = if starts_with_vowel_sound(&self.role_clause) {
            "an"
        } else {
            "a"
        };
        match &self.benefit_clause {
            Some(b) => format!(
                "As {article} {}, I want {}, so that {}.",
                self.role_clause, self.want_clause, b
            ),
            None => format!("As {article} {}, I want {}.", self.role_clause, self.want_clause),
        }
    }

    /// Clause-level view used for structural comparisons (ids excluded).
    pub fn structure(&self) -> (String, String, Option<String>, Vec<String>, Vec<String>) {
        (
            self.role_clause.clone(),
            self.want_clause.clone(),
            self.benefit_clause.clone(),
            self.criteria.iter().map(|c| c.text.clone()).collect(),
            self.themes.clone(),
        )
    }

    /// Placeholders in the story sentence itself (criteria excluded).
    pub fn sentence_placeholders(&self) -> Vec<Placeholder> {
        extract_placeholders(&self.sentence()).placeholders
    }
}

fn starts_with_vowel_sound(word: &str) -> bool {
    let lower = word.trim_start().to_lowercase();
    // "user", "university", "one-time" take "a" despite the vowel.
    if lower.starts_with("us") || lower.starts_with("uni") || lower.starts_with("one") || lower.starts_with("eu") {
        return false;
    }
    if lower.starts_with("hour") || lower.starts_with("honest") {
        return true;
    }
    matches!(lower.chars().next(), Some('a' | 'e' | 'i' | 'o' | 'u'))
}

/// One atomic requirement statement derived from a criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteRequirement {
    pub id: String,
    pub text: String,
    pub source_story_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_criterion_id: Option<String>,
}
