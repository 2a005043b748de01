//! Requirements export: a JSONL file whose first line is a schema header
//! and whose remaining lines are one record per discrete requirement.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::decompose::requirement_placeholders;
use crate::model::{DiscreteRequirement, UserStory};

pub const REQUIREMENTS_SCHEMA: &str = "malea.requirements";
pub const REQUIREMENTS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementRecord {
    pub id: String,
    pub text: String,
    pub story_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_id: Option<String>,
    #[serde(default)]
    pub placeholders: Vec<String>,
    #[serde(default)]
    pub themes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema: String,
    version: u32,
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("missing or wrong schema header (expected {REQUIREMENTS_SCHEMA} v{REQUIREMENTS_VERSION})")]
    Header,
    #[error("duplicate requirement id {0}")]
    DuplicateId(String),
}

pub fn requirement_records(
    stories: &[UserStory],
    requirements: &[DiscreteRequirement],
) -> Vec<RequirementRecord> {
    requirements
        .iter()
        .map(|r| RequirementRecord {
            id: r.id.clone(),
            text: r.text.clone(),
            story_id: r.source_story_id.clone(),
            criterion_id: r.source_criterion_id.clone(),
            placeholders: requirement_placeholders(r),
            themes: stories
                .iter()
                .find(|s| s.id == r.source_story_id)
                .map(|s| s.themes.clone())
                .unwrap_or_default(),
        })
        .collect()
}

pub fn write_requirements(records: &[RequirementRecord]) -> String {
    let mut out = serde_json::to_string(&Header {
        schema: REQUIREMENTS_SCHEMA.into(),
        version: REQUIREMENTS_VERSION,
    })
    .expect("header serializes");
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn read_requirements(text: &str) -> Result<Vec<RequirementRecord>, ExportError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(ExportError::Header)?;
    match serde_json::from_str::<Header>(header) {
        Ok(h) if h.schema == REQUIREMENTS_SCHEMA && h.version == REQUIREMENTS_VERSION => {}
        _ => return Err(ExportError::Header),
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, line) in lines {
        let rec: RequirementRecord =
            serde_json::from_str(line).map_err(|e| ExportError::Malformed {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        if !seen.insert(rec.id.clone()) {
            return Err(ExportError::DuplicateId(rec.id));
        }
        out.push(rec);
    }
    Ok(out)
}
