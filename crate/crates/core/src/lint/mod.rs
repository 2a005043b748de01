//! Local pre-check of story quality: atomic, minimal, unambiguous and
//! estimable. The linter annotates; it never blocks a session.

mod lexicon;
mod rules;
mod verbs;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Span, UserStory};

pub use lexicon::{Lexicon, DEFAULT_LEXICON};
pub use rules::is_measurable;
pub use verbs::is_common_verb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityCriterion {
    Atomic,
    Minimal,
    Unambiguous,
    Estimable,
}

impl QualityCriterion {
    pub const ALL: [QualityCriterion; 4] = [
        QualityCriterion::Atomic,
        QualityCriterion::Minimal,
        QualityCriterion::Unambiguous,
        QualityCriterion::Estimable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QualityCriterion::Atomic => "atomic",
            QualityCriterion::Minimal => "minimal",
            QualityCriterion::Unambiguous => "unambiguous",
            QualityCriterion::Estimable => "estimable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for QualityCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One finding. `span` indexes the story sentence when `criterion_id` is
/// `None`, otherwise that criterion's text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub criterion: QualityCriterion,
    pub story_id: String,
    pub criterion_id: Option<String>,
    pub span: Span,
    pub rationale: String,
}

impl Violation {
    /// The text the span refers to.
    pub fn cited_text(&self, story: &UserStory) -> Option<String> {
        match &self.criterion_id {
            None => Some(story.sentence()),
            Some(id) => story
                .criteria
                .iter()
                .find(|c| &c.id == id)
                .map(|c| c.text().to_string()),
        }
    }

    pub fn excerpt(&self, story: &UserStory) -> Option<String> {
        let text = self.cited_text(story)?;
        self.span
            .within(&text)
            .then(|| self.span.slice(&text).to_string())
    }
}

/// Runs every rule over one story.
pub fn lint(story: &UserStory, lexicon: &Lexicon) -> Vec<Violation> {
    let sentence = story.sentence();
    let mut out = rules::atomic(story, &sentence);
    out.extend(rules::minimal(story, &sentence));
    out.extend(rules::unambiguous(story, &sentence, lexicon));
    out.extend(rules::estimable(story, &sentence));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintReport {
    pub per_criterion: BTreeMap<QualityCriterion, usize>,
    pub per_story: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

impl LintReport {
    pub fn total(&self) -> usize {
        self.per_criterion.values().sum()
    }

    pub fn count(&self, criterion: QualityCriterion) -> usize {
        self.per_criterion.get(&criterion).copied().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            let at = match &v.criterion_id {
                Some(c) => format!("{} / {}", v.story_id, c),
                None => v.story_id.clone(),
            };
            out.push_str(&format!(
                "{at} [{}] {}..{}: {}\n",
                v.criterion, v.span.start, v.span.end, v.rationale
            ));
        }
        let counts: Vec<String> = QualityCriterion::ALL
            .iter()
            .map(|c| format!("{c}={}", self.count(*c)))
            .collect();
        out.push_str(&format!("total={} {}\n", self.total(), counts.join(" ")));
        out
    }
}

pub fn lint_report(stories: &[UserStory], lexicon: &Lexicon) -> LintReport {
    let mut per_criterion: BTreeMap<QualityCriterion, usize> =
        QualityCriterion::ALL.iter().map(|c| (*c, 0)).collect();
    let mut per_story = BTreeMap::new();
    let mut violations = Vec::new();
    for story in stories {
        let found = lint(story, lexicon);
        *per_story.entry(story.id.clone()).or_insert(0) += found.len();
        for v in &found {
            *per_criterion.entry(v.criterion).or_insert(0) += 1;
        }
        violations.extend(found);
    }
    LintReport {
        per_criterion,
        per_story,
        violations,
    }
}
