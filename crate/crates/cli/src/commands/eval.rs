use std::io::Write;
use std::path::{Path, PathBuf};

use malea_core::codec::{read_requirements, RequirementRecord};
use malea_core::eval::{
    aggregate, compute_metrics, read_gold, read_mapping, render_aggregate, render_table, suggest_mapping,
    theme_coverage, validate_mapping, write_mapping, EvalRecord, GoldRequirement, MappingRecord, TopicLexicon,
};

use super::{live_provider, load_config, read_file, write_file};
use crate::{exit, write_out, CliError, CoverageArgs, EvalArgs, SuggestArgs};

/// One GOLD MAPPING REQUIREMENTS triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCase {
    pub gold: PathBuf,
    pub mapping: PathBuf,
    pub requirements: Option<PathBuf>,
}

pub fn parse_triples(files: &[PathBuf]) -> Result<Vec<EvalCase>, CliError> {
    if files.is_empty() || !files.len().is_multiple_of(3) {
        return Err(CliError::Usage(format!(
            "eval takes GOLD MAPPING REQUIREMENTS triples, got {} paths",
            files.len()
        )));
    }
    Ok(files
        .chunks(3)
        .map(|c| EvalCase {
            gold: c[0].clone(),
            mapping: c[1].clone(),
            requirements: (c[2].as_os_str() != "-").then(|| c[2].clone()),
        })
        .collect())
}

/// `fake-review/malea/mapping.csv` is labelled "fake-review/malea".
fn default_label(mapping: &Path) -> String {
    let dirs: Vec<String> = mapping
        .parent()
        .into_iter()
        .flat_map(|p| p.iter().rev().take(2))
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| s != "." && !s.is_empty())
        .collect();
    if dirs.is_empty() {
        return mapping.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    }
    dirs.into_iter().rev().collect::<Vec<_>>().join("/")
}

fn load_gold(path: &Path) -> Result<Vec<GoldRequirement>, CliError> {
    read_gold(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_mapping(path: &Path) -> Result<Vec<MappingRecord>, CliError> {
    read_mapping(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_requirements(path: &Path) -> Result<Vec<RequirementRecord>, CliError> {
    read_requirements(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cases = parse_triples(&args.files)?;
    if !args.label.is_empty() && args.label.len() != cases.len() {
        return Err(CliError::Usage(format!(
            "{} labels for {} triples",
            args.label.len(),
            cases.len()
        )));
    }
    let mut rows = Vec::new();
    let mut finding_count = 0;
    for (i, case) in cases.iter().enumerate() {
        let gold = load_gold(&case.gold)?;
        let mapping = load_mapping(&case.mapping)?;
        let reqs = case.requirements.as_deref().map(load_requirements).transpose()?;
        for f in validate_mapping(&mapping, &gold, reqs.as_deref()) {
            finding_count += 1;
            write_out(out, &format!("{}: {:?}: {}\n", case.mapping.display(), f.kind, f.message))?;
        }
        let label = args
            .label
            .get(i)
            .cloned()
            .unwrap_or_else(|| default_label(&case.mapping));
        rows.push(EvalRecord::new(label, compute_metrics(&mapping, &gold)));
    }
    if finding_count > 0 && !args.force {
        return Err(CliError::Findings(format!(
            "{finding_count} mapping validation findings (use --force to report anyway)"
        )));
    }
    let pooled = args
        .aggregate
        .then(|| aggregate(&rows.iter().map(|r| r.metrics).collect::<Vec<_>>()));
    if args.json {
        for r in &rows {
            write_out(out, &format!("{}\n", serde_json::to_string(r).expect("record serializes")))?;
        }
        if let Some(a) = pooled {
            let line = serde_json::json!({ "aggregate": a });
            write_out(out, &format!("{line}\n"))?;
        }
    } else {
        write_out(out, &render_table(&rows))?;
        if let Some(a) = pooled {
            write_out(out, &render_aggregate(&a))?;
        }
    }
    Ok(exit::OK)
}

pub fn cmd_coverage(args: &CoverageArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = load_config(args.config.as_deref())?;
    let lexicon = match &args.keywords {
        Some(p) => TopicLexicon::from_toml(&read_file(p)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => TopicLexicon::default(),
    };
    let reqs = load_requirements(&args.requirements)?;
    write_out(out, &theme_coverage(&reqs, &config.themes, &lexicon).to_text())?;
    Ok(exit::OK)
}

pub fn cmd_suggest(args: &SuggestArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = load_config(args.config.as_deref())?;
    let gold = load_gold(&args.gold)?;
    let reqs = load_requirements(&args.requirements)?;
    let provider = live_provider(&config)?;
    let mapping = suggest_mapping(&reqs, &gold, &provider, &config.model_name)
        .map_err(|e| CliError::Provider(e.to_string()))?;
    log::warn!("suggested rows are marked unreviewed; check them before running eval");
    let text = write_mapping(&mapping);
    match &args.output {
        Some(p) => write_file(p, &text)?,
        None => write_out(out, &text)?,
    }
    Ok(exit::OK)
}
