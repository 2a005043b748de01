//! Parsing agent text into stories, rendering canonical documents,
//! placeholder extraction and criterion decomposition.

mod decompose;
mod emit;
mod export;
mod parse;
mod placeholder;

pub use decompose::{
    decompose, decompose_all, requirement_placeholders, split_obligations, DecomposeMode,
    Decomposition, LlmDecomposer, DECOMPOSITION_PROMPT,
};
pub use emit::{emit_markdown, placeholder_index, DocumentMeta, EmitError, PlaceholderLocation};
pub use export::{
    read_requirements, requirement_records, write_requirements, ExportError, RequirementRecord,
    REQUIREMENTS_SCHEMA, REQUIREMENTS_VERSION,
};
pub use parse::{parse_document, parse_stories, ParsedDocument, Residue};
pub use placeholder::{extract_placeholders, PlaceholderScan};
