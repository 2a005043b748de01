use std::io::Write;
use std::path::Path;

use malea_core::codec::{decompose_all, requirement_records, DecomposeMode};
use malea_core::eval::{theme_coverage, TopicLexicon};
use malea_core::orchestrator::{
    prepare_output_dir, run_baseline_with, run_session_with, write_failure, write_success, Manifest, SessionEnv,
    SessionMode,
};
use malea_core::provider::{RecordingProvider, ReplayProvider};
use malea_core::{ChatProvider, PhaseOutcome, RunConfig, SessionError, SessionResult, SystemDescription};

use super::{live_provider, load_cassette, load_config, load_description, load_personas, read_file};
use crate::{exit, write_out, CliError, ReplayArgs, RunArgs};

fn outcome(o: Option<PhaseOutcome>) -> &'static str {
    match o {
        Some(PhaseOutcome::Approved) => "approved",
        Some(PhaseOutcome::CycleLimit) => "cycle limit",
        None => "not run",
    }
}

fn summary(result: &SessionResult, manifest: &Manifest, config: &RunConfig, dir: &Path) -> String {
    let mut s = format!("session {}: {:?}\n", manifest.session_id, manifest.status);
    if result.mode == SessionMode::Malea {
        s.push_str(&format!("quality review: {}\n", outcome(result.termination.quality)));
        s.push_str(&format!("ethics review: {}\n", outcome(result.termination.ethics)));
    }
    s.push_str(&format!(
        "provider calls: {}/{}\nstories: {}  requirements: {}  placeholders: {}\n",
        manifest.provider_calls,
        manifest.max_provider_calls,
        manifest.story_count,
        manifest.requirement_count,
        manifest.placeholder_count
    ));
    let reqs = decompose_all(&result.stories, DecomposeMode::Rule).requirements;
    let records = requirement_records(&result.stories, &reqs);
    s.push_str("theme coverage:\n");
    s.push_str(&theme_coverage(&records, &config.themes, &TopicLexicon::default()).to_text());
    s.push_str(&format!("artifacts: {}\n", dir.display()));
    s
}

fn run_with(
    mode: SessionMode,
    config: &RunConfig,
    description: &SystemDescription,
    provider: &dyn ChatProvider,
    env: &SessionEnv,
) -> Result<SessionResult, SessionError> {
    match mode {
        SessionMode::Malea => run_session_with(config, description, provider, env),
        SessionMode::Baseline => run_baseline_with(config, description, provider, env),
    }
}

/// `run`. `provider` replaces the replay or live provider (tests).
/// Replayed and recorded runs use a stepping clock from the Unix epoch so
/// a recording replays to identical bytes.
pub fn cmd_run(args: &RunArgs, provider: Option<&dyn ChatProvider>, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(m) = args.max_cycles {
        config.max_critique_cycles = m;
    }
    config.validate()?;
    let description = load_description(&args.description)?;
    let mut env = if args.replay.is_some() || args.record {
        SessionEnv::deterministic()
    } else {
        SessionEnv::default()
    };
    env.personas = load_personas(args.personas.as_deref())?;

    let base: Box<dyn ChatProvider + '_> = match (provider, &args.replay) {
        (Some(p), _) => Box::new(p),
        (None, Some(path)) => Box::new(ReplayProvider::new(&load_cassette(path)?)),
        (None, None) => Box::new(live_provider(&config)?),
    };
    prepare_output_dir(&args.output, args.force)?;
    let recorder = RecordingProvider::new(base);
    let mode = if args.baseline {
        SessionMode::Baseline
    } else {
        SessionMode::Malea
    };
    let result = run_with(mode, &config, &description, &recorder, &env);
    let cassette = args.record.then(|| recorder.cassette());
    match result {
        Ok(r) => {
            let manifest = write_success(&args.output, &r, Some(description.title()), recorder.mode(), cassette.as_ref())?;
            write_out(out, &summary(&r, &manifest, &config, &args.output))?;
            Ok(exit::OK)
        }
        Err(e) => {
            write_failure(&args.output, &e, mode, &config, recorder.mode(), cassette.as_ref())?;
            Err((&e).into())
        }
    }
}

/// `replay`: reruns a recorded session offline and compares the final
/// document and transcript byte for byte with the recording.
pub fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let manifest_path = args.run_dir.join("manifest.json");
    let manifest = Manifest::from_json(&read_file(&manifest_path)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", manifest_path.display())))?;
    let cassette = load_cassette(&args.run_dir.join("cassette.jsonl"))?;
    let description = load_description(&args.description)?;
    let mut env = SessionEnv::deterministic();
    env.personas = load_personas(args.personas.as_deref())?;
    let provider = ReplayProvider::new(&cassette);
    let result = run_with(manifest.mode, &manifest.config, &description, &provider, &env)
        .map_err(|e| CliError::from(&e))?;

    let mut mismatches = Vec::new();
    for (name, produced) in [
        ("final_document.md", result.final_document.clone()),
        ("transcript.jsonl", result.transcript.to_jsonl()),
    ] {
        let recorded = read_file(&args.run_dir.join(name))?;
        let verdict = if recorded == produced { "identical" } else { "differs" };
        if recorded != produced {
            mismatches.push(name);
        }
        write_out(out, &format!("{name}: {verdict}\n"))?;
    }
    if let Some(dir) = &args.output {
        prepare_output_dir(dir, args.force)?;
        write_success(dir, &result, Some(description.title()), provider.mode(), Some(&cassette))?;
        write_out(out, &format!("artifacts: {}\n", dir.display()))?;
    }
    if mismatches.is_empty() {
        Ok(exit::OK)
    } else {
        Err(CliError::Findings(format!(
            "replay differs from the recording in {}",
            mismatches.join(", ")
        )))
    }
}
