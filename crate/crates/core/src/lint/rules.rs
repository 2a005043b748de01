//! Heuristic checks for the four story-level quality criteria.
//!
//! Each rule works on tokenized text only. Known false-positive classes:
//! - Atomic: nouns that double as verbs ("report", "log", "record") open a
//!   coordinated segment and look like a second action.
//! - Minimal: abbreviations followed by a space ("Dr. Smith") look like a
//!   sentence break inside the benefit clause.
//! - Unambiguous: lexicon terms used in a precise sense ("fast Fourier").
//! - Estimable: any number followed by a word counts as a quantity, so
//!   "step 2 shows" passes.

use std::sync::OnceLock;

use regex::Regex;

use super::{is_common_verb, Lexicon, QualityCriterion, Violation};
use crate::model::{Span, UserStory};

struct Patterns {
    parenthetical: Regex,
    bracketed: Regex,
    trailing_note: Regex,
    embedded_modal: Regex,
    embedded_quantity: Regex,
    quantity: Regex,
    comparison: Regex,
    frequency: Regex,
    standard: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        parenthetical: Regex::new(r"\([^()]*\)").unwrap(),
        bracketed: Regex::new(r"\[[^\[\]]*\]").unwrap(),
        trailing_note: Regex::new(
            r"(?i)\bnote\s*:|\be\.g\.|\bi\.e\.|;\s|\s[-\u{2013}\u{2014}]\s|[.!?]\s+\S",
        )
        .unwrap(),
        embedded_modal: Regex::new(r"(?i)\b(?:shall|must)\b").unwrap(),
        embedded_quantity: Regex::new(
            r"(?i)\b\d+(?:\.\d+)?\s*(?:%|percent\b|ms\b|milliseconds?\b|seconds?\b|minutes?\b|hours?\b|days?\b|weeks?\b|months?\b|years?\b)",
        )
        .unwrap(),
        quantity: Regex::new(r"\b\d+(?:[.,]\d+)?\s*(?:%|[A-Za-z]+)").unwrap(),
        comparison: Regex::new(
            r"(?i)\b(?:at least|at most|no more than|no less than|less than|more than|fewer than|greater than|up to|within|maximum|minimum|exceeds?|below|above)\b",
        )
        .unwrap(),
        frequency: Regex::new(
            r"(?i)\b(?:every|each|all|daily|weekly|monthly|quarterly|annually|yearly|hourly|whenever|when|upon|before|after|if|unless|always|never)\b",
        )
        .unwrap(),
        standard: Regex::new(
            r"\b(?:ISO(?:/IEC)?\s*\d+|IEC\s*\d+|WCAG|GDPR|HIPAA|NIST|OWASP|PDPL|CCPA|AES(?:-\d+)?|TLS(?:\s*\d+(?:\.\d+)?)?|SOC\s*2|RFC\s*\d+)\b",
        )
        .unwrap(),
    })
}

fn story_violation(story: &UserStory, criterion: QualityCriterion, span: Span, rationale: String) -> Violation {
    Violation {
        criterion,
        story_id: story.id.clone(),
        criterion_id: None,
        span,
        rationale,
    }
}

/// Byte range of `clause` inside the story sentence, located after `marker`.
fn clause_span(sentence: &str, marker: &str, clause: &str) -> Option<Span> {
    let at = sentence.find(marker)? + marker.len();
    let rel = sentence[at..].find(clause)?;
    Some(Span::new(at + rel, at + rel + clause.len()))
}

/// Splits at top-level list separators: commas, "and", "or", "as well as", "&".
fn coordinated_segments(text: &str) -> Vec<(usize, &str)> {
    const JOINERS: [&str; 4] = [" and ", " or ", " as well as ", " & "];
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut seg_start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ => {}
        }
        if depth == 0 {
            if bytes[i] == b',' {
                out.push((seg_start, &text[seg_start..i]));
                seg_start = i + 1;
                i += 1;
                continue;
            }
            if let Some(j) = JOINERS.iter().find(|j| text[i..].starts_with(**j)) {
                out.push((seg_start, &text[seg_start..i]));
                seg_start = i + j.len() - 1;
                i += j.len() - 1;
                continue;
            }
        }
        i += 1;
    }
    out.push((seg_start, &text[seg_start..]));
    out.into_iter()
        .map(|(s, t)| {
            let lead = t.len() - t.trim_start().len();
            (s + lead, t.trim())
        })
        .filter(|(_, t)| !t.is_empty())
        .collect()
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// The verb a segment opens with, if any.
fn leading_verb(segment: &str, first: bool) -> Option<String> {
    let ws = words(segment);
    let mut rest: &[String] = &ws;
    if first {
        // "the system to explain ..." -> "explain"
        if let Some(pos) = ws.iter().position(|w| w == "to") {
            rest = &ws[pos + 1..];
        }
    }
    while let Some((w, tail)) = rest.split_first() {
        if matches!(w.as_str(), "to" | "also" | "then" | "and" | "or") {
            rest = tail;
        } else {
            break;
        }
    }
    rest.first().filter(|w| is_common_verb(w)).cloned()
}

pub(super) fn atomic(story: &UserStory, sentence: &str) -> Vec<Violation> {
    let segments = coordinated_segments(&story.want_clause);
    let verbs: Vec<String> = segments
        .iter()
        .enumerate()
        .filter_map(|(i, (_, s))| leading_verb(s, i == 0))
        .collect();
    if verbs.len() < 2 {
        return Vec::new();
    }
    let span = clause_span(sentence, "I want ", &story.want_clause)
        .unwrap_or_else(|| Span::new(0, sentence.len()));
    vec![story_violation(
        story,
        QualityCriterion::Atomic,
        span,
        format!("want clause coordinates {} actions: {}", verbs.len(), verbs.join(", ")),
    )]
}

pub(super) fn minimal(story: &UserStory, sentence: &str) -> Vec<Violation> {
    let p = patterns();
    let placeholders = story.sentence_placeholders();
    let in_placeholder = |start: usize, end: usize| {
        placeholders
            .iter()
            .any(|ph| start < ph.span.end && ph.span.start < end)
    };
    let mut out = Vec::new();
    for m in p.parenthetical.find_iter(sentence).chain(p.bracketed.find_iter(sentence)) {
        if !in_placeholder(m.start(), m.end()) {
            out.push(story_violation(
                story,
                QualityCriterion::Minimal,
                Span::new(m.start(), m.end()),
                format!("parenthetical aside {:?}", m.as_str()),
            ));
        }
    }
    let last_clause = match &story.benefit_clause {
        Some(b) => clause_span(sentence, "so that ", b),
        None => clause_span(sentence, "I want ", &story.want_clause),
    };
    if let Some(clause) = last_clause {
        let text = clause.slice(sentence);
        if let Some(m) = p.trailing_note.find(text) {
            let start = clause.start + m.start();
            if !in_placeholder(start, clause.end) {
                out.push(story_violation(
                    story,
                    QualityCriterion::Minimal,
                    Span::new(start, clause.end),
                    "trailing note after the story's final clause".to_string(),
                ));
            }
        }
    }
    for m in p
        .embedded_modal
        .find_iter(sentence)
        .chain(p.embedded_quantity.find_iter(sentence))
    {
        if !in_placeholder(m.start(), m.end()) {
            out.push(story_violation(
                story,
                QualityCriterion::Minimal,
                Span::new(m.start(), m.end()),
                format!("acceptance detail {:?} embedded in the story sentence", m.as_str()),
            ));
        }
    }
    out.sort_by_key(|v| (v.span.start, v.span.end));
    out
}

pub(super) fn unambiguous(story: &UserStory, sentence: &str, lexicon: &Lexicon) -> Vec<Violation> {
    let mut out = Vec::new();
    for (span, term) in lexicon.find_all(sentence) {
        out.push(story_violation(
            story,
            QualityCriterion::Unambiguous,
            span,
            format!("vague term {term:?}"),
        ));
    }
    for ph in story.sentence_placeholders() {
        out.push(story_violation(
            story,
            QualityCriterion::Unambiguous,
            ph.span,
            "unresolved placeholder in the story sentence".to_string(),
        ));
    }
    for c in &story.criteria {
        for (span, term) in lexicon.find_all(c.text()) {
            out.push(Violation {
                criterion: QualityCriterion::Unambiguous,
                story_id: story.id.clone(),
                criterion_id: Some(c.id.clone()),
                span,
                rationale: format!("vague term {term:?}"),
            });
        }
    }
    out
}

/// True if the text carries something an estimate can be anchored on.
pub fn is_measurable(text: &str) -> bool {
    let p = patterns();
    p.quantity.is_match(text)
        || p.comparison.is_match(text)
        || p.frequency.is_match(text)
        || p.standard.is_match(text)
}

pub(super) fn estimable(story: &UserStory, sentence: &str) -> Vec<Violation> {
    let whole = Span::new(0, sentence.len());
    if story.criteria.is_empty() {
        return vec![story_violation(
            story,
            QualityCriterion::Estimable,
            whole,
            "story has no acceptance criteria".to_string(),
        )];
    }
    let anchored = story
        .criteria
        .iter()
        .any(|c| !c.placeholders().is_empty() || is_measurable(c.text()));
    if anchored {
        return Vec::new();
    }
    vec![story_violation(
        story,
        QualityCriterion::Estimable,
        whole,
        "no criterion states a quantity, percentage, condition or named standard".to_string(),
    )]
}
