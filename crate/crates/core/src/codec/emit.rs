//! Canonical markdown rendering of a story set.

use thiserror::Error;

use crate::model::UserStory;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentMeta {
    pub title: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmitError {
    #[error("a final document needs at least one story")]
    NoStories,
}

/// One entry of the placeholder index, with document coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceholderLocation {
    pub story_id: String,
    pub criterion_id: Option<String>,
    pub description: Option<String>,
}

/// Every placeholder in the stories, story sentences first within each story.
pub fn placeholder_index(stories: &[UserStory]) -> Vec<PlaceholderLocation> {
    let mut out = Vec::new();
    for (i, story) in stories.iter().enumerate() {
        let story_id = format!("US-{}", i + 1);
        for p in story.sentence_placeholders() {
            out.push(PlaceholderLocation {
                story_id: story_id.clone(),
                criterion_id: None,
                description: p.description,
            });
        }
        for (j, c) in story.criteria.iter().enumerate() {
            for p in c.placeholders() {
                out.push(PlaceholderLocation {
                    story_id: story_id.clone(),
                    criterion_id: Some(format!("AC-{}.{}", i + 1, j + 1)),
                    description: p.description.clone(),
                });
            }
        }
    }
    out
}

/// Renders stories with canonical numbering (US-n, AC-n.k) and a trailing
/// placeholder index. Numbering is positional, whatever ids the input has.
pub fn emit_markdown(stories: &[UserStory], meta: &DocumentMeta) -> Result<String, EmitError> {
    if stories.is_empty() {
        return Err(EmitError::NoStories);
    }
    let mut out = String::new();
    let title = meta.title.as_deref().unwrap_or("Ethics Requirements");
    out.push_str(&format!("# {title}\n"));

    for (i, story) in stories.iter().enumerate() {
        let n = i + 1;
        out.push_str(&format!("\n## US-{n}\n\n{}\n", story.sentence()));
        if !story.themes.is_empty() {
            out.push_str(&format!("\nThemes: {}\n", story.themes.join(", ")));
        }
        if !story.criteria.is_empty() {
            out.push_str("\nAcceptance Criteria:\n");
            for (j, c) in story.criteria.iter().enumerate() {
                out.push_str(&format!("- AC-{n}.{}: {}\n", j + 1, c.text()));
            }
        }
    }

    out.push_str("\n## Placeholder Index\n\n");
    let index = placeholder_index(stories);
    if index.is_empty() {
        out.push_str("(none)\n");
    }
    for loc in index {
        let at = match &loc.criterion_id {
            Some(c) => format!("{} / {c}", loc.story_id),
            None => format!("{} (story)", loc.story_id),
        };
        let desc = loc.description.as_deref().unwrap_or("unspecified");
        out.push_str(&format!("- {at}: {desc}\n"));
    }
    Ok(out)
}
