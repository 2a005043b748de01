//! Splitting acceptance criteria into discrete requirement statements.
//!
//! Rule mode keeps one requirement per criterion unless the criterion is a
//! conjunction of independent obligations. A right-hand conjunct counts as
//! its own obligation when it
//!
//! * carries its own modal or copula ("... and logs must be kept"),
//! * opens with a participle that shares a passive auxiliary on the left,
//!   provided the left participle has a complement ("shall be encrypted in
//!   transit and encrypted at rest", but not "shall be sent and received
//!   over TLS"), or
//! * opens with a lexicon verb that shares a modal on the left, provided the
//!   left clause already has an object ("shall log errors and notify admins").
//!
//! Known misses: verb gapping without an object ("shall display and explain
//! X") and comma series ("X, Y, and Z") stay whole.

use crate::codec::extract_placeholders;
use crate::lint::is_common_verb;
use crate::model::{DiscreteRequirement, UserStory};
use crate::provider::{ChatProvider, ChatRequest};

const MODALS: &[&str] = &["shall", "must", "should", "will", "can", "is", "are"];
const IRREGULAR_PARTICIPLES: &[&str] = &[
    "kept", "shown", "written", "given", "made", "sent", "held", "built", "known", "seen", "taken",
    "done", "run", "met",
];

/// LLM-backed decomposition settings.
pub struct LlmDecomposer<'a> {
    pub provider: &'a dyn ChatProvider,
    pub model_name: String,
    pub temperature: Option<f64>,
    pub seed: Option<i64>,
}

pub enum DecomposeMode<'a> {
    Rule,
    Llm(&'a LlmDecomposer<'a>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub requirements: Vec<DiscreteRequirement>,
    pub warnings: Vec<String>,
}

pub const DECOMPOSITION_PROMPT: &str = "\
You convert acceptance criteria into discrete requirement statements.
Treat each acceptance criterion as one independent requirement, or as several \
independent requirements when it joins separate obligations.
Reply with one line per requirement in the form `<criterion id>: <requirement>`, \
using the criterion ids exactly as given. Do not add, drop or merge content. \
Do not write anything else.";

pub fn decompose(story: &UserStory, mode: DecomposeMode<'_>) -> Decomposition {
    match mode {
        DecomposeMode::Rule => decompose_rule(story),
        DecomposeMode::Llm(llm) => match decompose_llm(story, llm) {
            Ok(reqs) => Decomposition {
                requirements: reqs,
                warnings: Vec::new(),
            },
            Err(reason) => {
                let mut d = decompose_rule(story);
                d.warnings.push(format!(
                    "{}: model decomposition rejected ({reason}); used rule mode",
                    story.id
                ));
                d
            }
        },
    }
}

pub fn decompose_all(stories: &[UserStory], mode: DecomposeMode<'_>) -> Decomposition {
    let mut out = Decomposition::default();
    for story in stories {
        let mode = match &mode {
            DecomposeMode::Rule => DecomposeMode::Rule,
            DecomposeMode::Llm(l) => DecomposeMode::Llm(l),
        };
        let d = decompose(story, mode);
        out.requirements.extend(d.requirements);
        out.warnings.extend(d.warnings);
    }
    out
}

fn requirement_prefix(story: &UserStory) -> String {
    match story.id.strip_prefix("US-") {
        Some(n) => format!("R-{n}"),
        None => format!("{}-R", story.id),
    }
}

fn decompose_rule(story: &UserStory) -> Decomposition {
    let prefix = requirement_prefix(story);
    let mut reqs = Vec::new();
    if story.criteria.is_empty() {
        let mut s = story.clone();
        s.benefit_clause = None;
        reqs.push(DiscreteRequirement {
            id: format!("{prefix}.1"),
            text: s.sentence(),
            source_story_id: story.id.clone(),
            source_criterion_id: None,
        });
    }
    for c in &story.criteria {
        for text in split_obligations(c.text()) {
            reqs.push(DiscreteRequirement {
                id: format!("{prefix}.{}", reqs.len() + 1),
                text,
                source_story_id: story.id.clone(),
                source_criterion_id: Some(c.id.clone()),
            });
        }
    }
    Decomposition {
        requirements: reqs,
        warnings: Vec::new(),
    }
}

fn decompose_llm(story: &UserStory, llm: &LlmDecomposer<'_>) -> Result<Vec<DiscreteRequirement>, String> {
    if story.criteria.is_empty() {
        return Ok(decompose_rule(story).requirements);
    }
    let mut listing = format!("Story: {}\n", story.sentence());
    for c in &story.criteria {
        listing.push_str(&format!("{}: {}\n", c.id, c.text()));
    }
    let request = ChatRequest {
        system_prompt: DECOMPOSITION_PROMPT.to_string(),
        history: vec![("user".to_string(), listing)],
        temperature: llm.temperature,
        model_name: llm.model_name.clone(),
        seed: llm.seed,
    };
    let response = llm.provider.complete(&request).map_err(|e| e.to_string())?;
    let prefix = requirement_prefix(story);
    let mut reqs = Vec::new();
    for line in response.content.lines() {
        let line = line.trim().trim_start_matches(['-', '*']).trim();
        let Some((id, text)) = line.split_once(':') else {
            continue;
        };
        let id = id.trim().trim_matches('`').trim_matches('*');
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        if !story.criteria.iter().any(|c| c.id == id) {
            return Err(format!("unknown criterion id {id:?}"));
        }
        reqs.push(DiscreteRequirement {
            id: format!("{prefix}.{}", reqs.len() + 1),
            text: text.to_string(),
            source_story_id: story.id.clone(),
            source_criterion_id: Some(id.to_string()),
        });
    }
    for c in &story.criteria {
        if !reqs
            .iter()
            .any(|r| r.source_criterion_id.as_deref() == Some(c.id.as_str()))
        {
            return Err(format!("criterion {} not covered", c.id));
        }
    }
    Ok(reqs)
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn bare(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric() && c != '-')
        .to_lowercase()
}

fn is_modal(word: &str) -> bool {
    MODALS.contains(&bare(word).as_str())
}

fn is_participle(word: &str) -> bool {
    let w = bare(word);
    (w.len() > 3 && w.ends_with("ed")) || IRREGULAR_PARTICIPLES.contains(&w.as_str())
}

/// Byte offsets of top-level " and " separators (outside brackets).
fn conjunction_points(text: &str) -> Vec<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    let mut out = Vec::new();
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b' ' if depth == 0 && text[i..].starts_with(" and ") => out.push(i),
            _ => {}
        }
    }
    out
}

struct LeftClause<'a> {
    subject: &'a str,
    aux: String,
    passive: bool,
    has_object: bool,
}

fn analyse_left(left: &str) -> Option<LeftClause<'_>> {
    let ws = words(left);
    let modal_at = ws.iter().position(|w| is_modal(w))?;
    if modal_at == 0 {
        return None;
    }
    let subject_end = left
        .match_indices(ws[modal_at])
        .map(|(i, _)| i)
        .find(|&i| left[..i].split_whitespace().count() == modal_at)?;
    let subject = left[..subject_end].trim_end();
    let mut aux = vec![ws[modal_at]];
    let mut k = modal_at + 1;
    while k < ws.len() && matches!(bare(ws[k]).as_str(), "not" | "be" | "always" | "also") {
        aux.push(ws[k]);
        k += 1;
    }
    let passive = aux.iter().any(|w| matches!(bare(w).as_str(), "be" | "is" | "are"));
    // modal + verb + at least one more word
    let has_object = ws.len() > k + 1;
    Some(LeftClause {
        subject,
        aux: aux.join(" "),
        passive,
        has_object,
    })
}

fn finish(sentence: &str) -> String {
    let s = sentence.trim().trim_end_matches(['.', ',', ';']).trim();
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => format!("{}{}.", first.to_uppercase(), chars.as_str()),
        None => String::new(),
    }
}

/// Splits one criterion into its independent obligations.
pub fn split_obligations(text: &str) -> Vec<String> {
    let text = text.trim();
    let points = conjunction_points(text);
    if points.is_empty() {
        return vec![finish(text)];
    }
    let first_left = &text[..points[0]];
    let Some(left) = analyse_left(first_left) else {
        return vec![finish(text)];
    };

    let mut pieces: Vec<String> = Vec::new();
    let mut current_start = 0usize;
    let mut current_prefix = String::new();
    for (n, &p) in points.iter().enumerate() {
        let right_end = points.get(n + 1).copied().unwrap_or(text.len());
        let right = text[p + " and ".len()..right_end].trim();
        let rw = words(right);
        let Some(first) = rw.iter().copied().find(|w| !bare(w).ends_with("ly")) else {
            continue;
        };
        let own_modal = rw.iter().take(5).any(|w| is_modal(w)) && rw.len() >= 2;
        let replacement = if own_modal {
            if is_modal(rw[0]) {
                Some(format!("{} ", left.subject))
            } else {
                Some(String::new())
            }
        } else if left.has_object
            && rw.len() >= 2
            && if left.passive {
                is_participle(first)
            } else {
                is_common_verb(&bare(first))
            }
        {
            Some(format!("{} {} ", left.subject, left.aux))
        } else {
            None
        };
        if let Some(prefix) = replacement {
            pieces.push(finish(&format!(
                "{current_prefix}{}",
                &text[current_start..p]
            )));
            current_start = p + " and ".len();
            current_prefix = prefix;
        }
    }
    pieces.push(finish(&format!(
        "{current_prefix}{}",
        &text[current_start..]
    )));
    pieces.retain(|p| !p.is_empty());
    pieces
}

/// Placeholder tags present in a requirement's text.
pub fn requirement_placeholders(req: &DiscreteRequirement) -> Vec<String> {
    extract_placeholders(&req.text)
        .placeholders
        .into_iter()
        .map(|p| p.raw)
        .collect()
}
