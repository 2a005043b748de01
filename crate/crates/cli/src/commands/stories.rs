use std::io::Write;
use std::path::Path;

use malea_core::codec::{
    decompose_all, parse_document, requirement_records, write_requirements, DecomposeMode, LlmDecomposer,
    ParsedDocument,
};
use malea_core::lint::{lint_report, Lexicon};

use super::{live_provider, load_config, read_file, write_file};
use crate::{exit, write_out, CliError, DecomposeArgs, LintArgs};

fn parse_file(path: &Path) -> Result<ParsedDocument, CliError> {
    let doc = parse_document(&read_file(path)?);
    for r in &doc.residue {
        log::warn!("{}:{}: not a story line: {}", path.display(), r.line, r.text);
    }
    Ok(doc)
}

pub fn cmd_lint(args: &LintArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let lexicon = match &args.lexicon {
        Some(p) => Lexicon::parse(&read_file(p)?),
        None => Lexicon::default(),
    };
    let mut total = 0;
    for path in &args.files {
        let doc = parse_file(path)?;
        let report = lint_report(&doc.stories, &lexicon);
        total += report.total();
        if args.json {
            let line = serde_json::json!({ "file": path.display().to_string(), "report": report });
            write_out(out, &format!("{line}\n"))?;
        } else {
            write_out(out, &format!("== {} ({} stories)\n{}", path.display(), doc.stories.len(), report.to_text()))?;
        }
    }
    if args.strict && total > 0 {
        return Err(CliError::Findings(format!("{total} quality violations")));
    }
    Ok(exit::OK)
}

pub fn cmd_decompose(args: &DecomposeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let doc = parse_file(&args.stories)?;
    if doc.stories.is_empty() {
        return Err(CliError::Parse(format!("{}: no user stories found", args.stories.display())));
    }
    let decomposition = if args.llm {
        let config = load_config(args.config.as_deref())?;
        let provider = live_provider(&config)?;
        let llm = LlmDecomposer {
            provider: &provider,
            model_name: config.model_name.clone(),
            temperature: Some(0.0),
            seed: config.seed,
        };
        decompose_all(&doc.stories, DecomposeMode::Llm(&llm))
    } else {
        decompose_all(&doc.stories, DecomposeMode::Rule)
    };
    for w in &decomposition.warnings {
        log::warn!("{w}");
    }
    let text = write_requirements(&requirement_records(&doc.stories, &decomposition.requirements));
    match &args.output {
        Some(p) => write_file(p, &text)?,
        None => write_out(out, &text)?,
    }
    Ok(exit::OK)
}
