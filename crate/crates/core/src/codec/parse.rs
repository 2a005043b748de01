//! Tolerant parser for agent-written user stories.
//!
//! Accepts the markdown variations models produce run to run: `#` headings,
//! `**bold**` markers, numbered or bulleted story lines, "User Story 3:" and
//! "US-3:" labels, and criteria either under an "Acceptance Criteria"
//! heading or as bullets directly after the story. Lines that fit none of
//! these shapes are kept as residue.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::{AcceptanceCriterion, UserStory};

/// A line the parser could not place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residue {
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedDocument {
    pub title: Option<String>,
    pub stories: Vec<UserStory>,
    /// Non-story headings, kept for context.
    pub headings: Vec<String>,
    pub residue: Vec<Residue>,
}

impl ParsedDocument {
    pub fn is_clean(&self) -> bool {
        self.residue.is_empty()
    }
}

struct Patterns {
    bullet: Regex,
    story_label: Regex,
    story: Regex,
    criteria_header: Regex,
    criterion_label: Regex,
    themes: Regex,
    index_header: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        bullet: Regex::new(r"^(?:[-*+•]|\d+[.)]|[a-z][.)])\s+").unwrap(),
        story_label: Regex::new(
            r"(?i)^(?:user\s+story|story|us)[\s\-#]*\d*(?:\.\d+)?\s*(?:[:.\-–—]\s*|$)",
        )
        .unwrap(),
        story: Regex::new(
            r"(?i)^as\s+(?:an?|the)\s+(?P<role>.+?)\s*,?\s+I\s+(?:want|need|would\s+like)\s+(?P<want>.+?)(?:\s*,?\s+so\s+that\s+(?P<benefit>.+?))?\s*$",
        )
        .unwrap(),
        criteria_header: Regex::new(r"(?i)^acceptance\s+criteria\s*:?\s*(?P<rest>.*)$").unwrap(),
        criterion_label: Regex::new(
            r"(?i)^(?:ac|acceptance\s+criterion|criterion)[\s\-]*\d+(?:\.\d+)*\s*[:.)\-–—]\s*",
        )
        .unwrap(),
        themes: Regex::new(r"(?i)^(?:ethics\s+)?(?:themes?|topics?)\s*:\s*(?P<list>.+)$").unwrap(),
        index_header: Regex::new(r"(?i)^placeholder\s+index\s*:?$").unwrap(),
    })
}

fn strip_emphasis(s: &str) -> String {
    s.replace("**", "").replace("__", "").trim().to_string()
}

fn strip_final_period(s: &str) -> String {
    let t = s.trim();
    t.strip_suffix('.').unwrap_or(t).trim_end().to_string()
}

/// Recognises a story sentence, with any label already removed.
fn match_story(text: &str) -> Option<(String, String, Option<String>)> {
    let p = patterns();
    let caps = p.story.captures(text)?;
    let role = caps["role"].trim().to_string();
    let (want, benefit) = match caps.name("benefit") {
        Some(b) => (
            caps["want"].trim().trim_end_matches(',').trim().to_string(),
            Some(strip_final_period(b.as_str())),
        ),
        None => (strip_final_period(&caps["want"]), None),
    };
    if role.is_empty() || want.is_empty() {
        return None;
    }
    Some((role, want, benefit.filter(|b| !b.is_empty())))
}

#[derive(PartialEq)]
enum Mode {
    /// Outside any story.
    Free,
    /// After a story sentence; bullets become criteria.
    Story,
    /// Under an "Acceptance Criteria" header; every line is a criterion.
    Criteria,
    /// Inside the generated placeholder index.
    Index,
}

struct Builder {
    doc: ParsedDocument,
    mode: Mode,
    current: Option<UserStory>,
    seen_content: bool,
}

impl Builder {
    fn close_story(&mut self) {
        if let Some(story) = self.current.take() {
            self.doc.stories.push(story);
        }
    }

    fn open_story(&mut self, role: String, want: String, benefit: Option<String>) {
        self.close_story();
        let n = self.doc.stories.len() + 1;
        self.current = Some(UserStory {
            id: format!("US-{n}"),
            role_clause: role,
            want_clause: want,
            benefit_clause: benefit,
            criteria: Vec::new(),
            themes: Vec::new(),
        });
        self.mode = Mode::Story;
        self.seen_content = true;
    }

    fn add_criterion(&mut self, text: &str) -> bool {
        let p = patterns();
        let text = p.criterion_label.replace(text, "");
        let text = text.trim();
        let Some(story) = self.current.as_mut() else {
            return false;
        };
        if text.is_empty() {
            return true;
        }
        let story_n = self.doc.stories.len() + 1;
        let id = format!("AC-{story_n}.{}", story.criteria.len() + 1);
        story.criteria.push(AcceptanceCriterion::new(id, text));
        true
    }

    fn residue(&mut self, line: usize, text: &str) {
        self.doc.residue.push(Residue {
            line,
            text: text.to_string(),
        });
    }
}

pub fn parse_document(text: &str) -> ParsedDocument {
    let p = patterns();
    let mut b = Builder {
        doc: ParsedDocument::default(),
        mode: Mode::Free,
        current: None,
        seen_content: false,
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || is_rule(trimmed) {
            continue;
        }

        if trimmed.starts_with('#') {
            let heading = strip_emphasis(trimmed.trim_start_matches('#'));
            let unlabeled = p.story_label.replace(&heading, "").trim().to_string();
            if let Some((role, want, benefit)) = match_story(&unlabeled) {
                b.open_story(role, want, benefit);
                continue;
            }
            if let Some(c) = p.criteria_header.captures(&unlabeled) {
                if b.current.is_some() {
                    b.mode = Mode::Criteria;
                    let rest = c["rest"].trim().to_string();
                    if !rest.is_empty() {
                        b.add_criterion(&rest);
                    }
                    continue;
                }
            }
            if p.index_header.is_match(&heading) {
                b.close_story();
                b.mode = Mode::Index;
                continue;
            }
            b.close_story();
            b.mode = Mode::Free;
            if !b.seen_content && b.doc.title.is_none() && trimmed.starts_with("# ") {
                b.doc.title = Some(heading);
            } else {
                b.doc.headings.push(heading);
            }
            b.seen_content = true;
            continue;
        }

        if b.mode == Mode::Index {
            continue;
        }

        let clean = strip_emphasis(trimmed);
        let (is_bullet, body) = match p.bullet.find(&clean) {
            Some(m) => (true, clean[m.end()..].trim().to_string()),
            None => (false, clean.clone()),
        };
        let unlabeled = p.story_label.replace(&body, "").trim().to_string();
        if unlabeled.is_empty() && p.story_label.is_match(&body) {
            // a bare "User Story 2:" line; the sentence follows
            continue;
        }

        if let Some((role, want, benefit)) = match_story(&unlabeled) {
            b.open_story(role, want, benefit);
            continue;
        }
        if b.current.is_some() {
            if let Some(c) = p.criteria_header.captures(&body) {
                b.mode = Mode::Criteria;
                let rest = c["rest"].trim().to_string();
                if !rest.is_empty() {
                    b.add_criterion(&rest);
                }
                continue;
            }
            if let Some(c) = p.themes.captures(&body) {
                let story = b.current.as_mut().expect("checked");
                for t in c["list"].split([',', ';']) {
                    let t = t.trim().trim_end_matches('.').trim();
                    if !t.is_empty() && !story.themes.iter().any(|x| x == t) {
                        story.themes.push(t.to_string());
                    }
                }
                continue;
            }
            if is_bullet || b.mode == Mode::Criteria {
                b.add_criterion(&body);
                continue;
            }
        }
        if p.index_header.is_match(&body) {
            b.close_story();
            b.mode = Mode::Index;
            continue;
        }
        b.seen_content = true;
        b.residue(line_no, trimmed);
    }
    b.close_story();
    b.doc
}

/// Stories only; see [`parse_document`] for residue and headings.
pub fn parse_stories(text: &str) -> Vec<UserStory> {
    parse_document(text).stories
}

fn is_rule(line: &str) -> bool {
    line.len() >= 3 && line.chars().all(|c| matches!(c, '-' | '*' | '_' | '='))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_story_with_header() {
        let text = "As a deaf user, I want instant translation of my signing, so that I can communicate at help desks.\nAcceptance Criteria:\n- The system responds within 5 seconds 95% of the time.";
        let doc = parse_document(text);
        assert_eq!(doc.stories.len(), 1);
        let s = &doc.stories[0];
        assert_eq!(s.role_clause, "deaf user");
        assert_eq!(s.want_clause, "instant translation of my signing");
        assert_eq!(
            s.benefit_clause.as_deref(),
            Some("I can communicate at help desks")
        );
        assert_eq!(s.criteria.len(), 1);
        assert_eq!(
            s.criteria[0].text(),
            "The system responds within 5 seconds 95% of the time."
        );
        assert!(doc.is_clean());
    }

    #[test]
    fn empty_input() {
        assert!(parse_stories("").is_empty());
        assert!(parse_document("   \n\n").is_clean());
    }

    #[test]
    fn markdown_variants() {
        let text = "\
# Ethics Requirements

### User Story 1: Transparency of AI use
**As a** user, **I want** to know that translations are produced by AI, so that I can judge their reliability.

**Acceptance Criteria:**
1. A notice states that the translation is machine generated.
2. The notice is shown before the first translation.

2. **User Story 2:** As an administrator I want a log of flagged reviews
   - Every flagged review is logged with its score.
";
        let doc = parse_document(text);
        assert_eq!(doc.title.as_deref(), Some("Ethics Requirements"));
        assert_eq!(doc.stories.len(), 2);
        assert_eq!(doc.stories[0].role_clause, "user");
        assert_eq!(doc.stories[0].criteria.len(), 2);
        assert_eq!(doc.stories[1].role_clause, "administrator");
        assert_eq!(doc.stories[1].want_clause, "a log of flagged reviews");
        assert_eq!(doc.stories[1].benefit_clause, None);
        assert_eq!(doc.stories[1].criteria[0].id, "AC-2.1");
        assert!(doc.is_clean(), "{:?}", doc.residue);
    }

    #[test]
    fn residue_is_reported() {
        let text = "Here is the draft you asked for.\nAs a user, I want X.\n- crit\nSome trailing remark.";
        let doc = parse_document(text);
        assert_eq!(doc.stories.len(), 1);
        assert_eq!(doc.residue.len(), 2);
        assert_eq!(doc.residue[0].line, 1);
        assert_eq!(doc.residue[1].text, "Some trailing remark.");
    }

    #[test]
    fn theme_lines_and_labels() {
        let text = "US-1: As a reviewer, I want explanations, so that I trust flags.\nThemes: Transparency, explainability\nAcceptance Criteria:\n- AC-1.1: Each flag shows its top three features.";
        let s = &parse_stories(text)[0];
        assert_eq!(s.themes, vec!["Transparency", "explainability"]);
        assert_eq!(s.criteria[0].text(), "Each flag shows its top three features.");
    }

    #[test]
    fn bare_story_labels_are_skipped() {
        let text = "**User Story 1:**\nAs a user, I want A.\nAcceptance Criteria:\n- one\n\n**User Story 2:**\nAs a user, I want B.\n- two\n";
        let doc = parse_document(text);
        assert_eq!(doc.stories.len(), 2);
        assert_eq!(doc.stories[0].criteria.len(), 1);
        assert_eq!(doc.stories[1].criteria[0].text(), "two");
        assert!(doc.is_clean(), "{:?}", doc.residue);
    }

    #[test]
    fn bullets_before_any_story_are_residue() {
        let doc = parse_document("- orphan bullet\n");
        assert!(doc.stories.is_empty());
        assert_eq!(doc.residue.len(), 1);
    }
}
