use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use malea_cli::{cmd_run, exit, RunArgs};
use malea_core::provider::ScriptedProvider;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn malea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_malea"))
        .args(args)
        .env_remove("MALEA_API_KEY")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect()
}

fn run_dir() -> PathBuf {
    fixtures().join("sessions/fake-review/run")
}

fn description() -> PathBuf {
    fixtures().join("cases/fake-review/description.md")
}

#[test]
fn missing_config_key_names_the_key() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("malea.toml");
    fs::write(&config, "provider_endpoint = \"https://example.org/v1\"\ntemperature = 0.2\n").unwrap();
    let o = malea(&[
        "run",
        "-d",
        path(&description()),
        "-c",
        path(&config),
        "-o",
        path(&tmp.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(stderr(&o).contains("model_name"), "{}", stderr(&o));
}

#[test]
fn live_run_without_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let o = malea(&["run", "-d", path(&description()), "-o", path(&tmp.path().join("out"))]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(stderr(&o).contains("MALEA_API_KEY"), "{}", stderr(&o));
}

#[test]
fn unknown_gold_id_is_a_finding() {
    let tmp = TempDir::new().unwrap();
    let case = fixtures().join("cases/fake-review");
    let mapping = fs::read_to_string(case.join("malea/mapping.csv")).unwrap();
    let broken = tmp.path().join("mapping.csv");
    fs::write(&broken, mapping.replacen(",G1,", ",G99,", 1)).unwrap();
    let o = malea(&["eval", path(&case.join("gold.csv")), path(&broken), "-"]);
    assert_eq!(o.status.code(), Some(exit::FINDINGS));
    assert!(String::from_utf8_lossy(&o.stdout).contains("G99"));
    let forced = malea(&["eval", "--force", path(&case.join("gold.csv")), path(&broken), "-"]);
    assert_eq!(forced.status.code(), Some(exit::OK));
}

#[test]
fn non_empty_output_needs_force() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("keep.txt"), "x").unwrap();
    let (desc, cassette) = (description(), run_dir().join("cassette.jsonl"));
    let args = ["run", "-d", path(&desc), "--replay", path(&cassette), "-o", path(tmp.path())];
    let o = malea(&args);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert_eq!(tree(tmp.path()).len(), 1);
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(malea(&forced).status.code(), Some(exit::OK));
}

#[test]
fn baseline_makes_one_call() {
    let tmp = TempDir::new().unwrap();
    let stories = fs::read_to_string(fixtures().join("cases/fake-review/single/stories.md")).unwrap();
    let provider = ScriptedProvider::new([stories]);
    let args = RunArgs {
        description: description(),
        config: None,
        output: tmp.path().join("out"),
        baseline: true,
        replay: None,
        record: false,
        seed: None,
        max_cycles: None,
        personas: None,
        force: false,
    };
    let code = cmd_run(&args, Some(&provider), &mut Vec::new()).unwrap();
    assert_eq!(code, exit::OK);
    assert_eq!(provider.calls(), 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["provider_calls"], 1);
    assert_eq!(manifest["mode"], "baseline");
}

#[test]
fn replayed_runs_write_identical_trees() {
    let tmp = TempDir::new().unwrap();
    let cassette = run_dir().join("cassette.jsonl");
    let mut trees = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let o = malea(&["run", "-d", path(&description()), "--replay", path(&cassette), "-o", path(&out)]);
        assert_eq!(o.status.code(), Some(exit::OK), "{}", stderr(&o));
        trees.push(tree(&out));
    }
    assert_eq!(trees[0], trees[1]);
    let names: Vec<&str> = trees[0].keys().map(String::as_str).collect();
    assert_eq!(
        names,
        ["final_document.md", "manifest.json", "requirements.jsonl", "stories.md", "transcript.jsonl"]
    );
    let recorded = tree(&run_dir());
    for name in ["final_document.md", "stories.md", "requirements.jsonl", "transcript.jsonl"] {
        assert_eq!(trees[0][name], recorded[name], "{name}");
    }
}

#[test]
fn replay_command_accepts_the_fixture() {
    let o = malea(&["replay", path(&run_dir()), "-d", path(&description())]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("final_document.md: identical"));
    assert!(stdout.contains("transcript.jsonl: identical"));
}

#[test]
fn tampered_recording_differs() {
    let tmp = TempDir::new().unwrap();
    for (name, bytes) in tree(&run_dir()) {
        fs::write(tmp.path().join(name), bytes).unwrap();
    }
    let doc = tmp.path().join("final_document.md");
    let text = fs::read_to_string(&doc).unwrap();
    fs::write(&doc, format!("{text}\nedited\n")).unwrap();
    let o = malea(&["replay", path(tmp.path()), "-d", path(&description())]);
    assert_eq!(o.status.code(), Some(exit::FINDINGS));
    assert!(String::from_utf8_lossy(&o.stdout).contains("final_document.md: differs"));
}

#[test]
fn decompose_is_pure() {
    let stories = fixtures().join("cases/ssl/malea/stories.md");
    let a = malea(&["decompose", path(&stories)]);
    let b = malea(&["decompose", path(&stories)]);
    assert_eq!(a.status.code(), Some(exit::OK));
    assert_eq!(a.stdout, b.stdout);
    let expected = fs::read(fixtures().join("cases/ssl/malea/requirements.jsonl")).unwrap();
    assert_eq!(a.stdout, expected);
}

#[test]
fn lint_strict_fails_on_violations() {
    let seeded = fixtures().join("lint/seeded.md");
    let clean = fixtures().join("lint/clean.md");
    assert_eq!(malea(&["lint", path(&seeded)]).status.code(), Some(exit::OK));
    assert_eq!(malea(&["lint", "--strict", path(&seeded)]).status.code(), Some(exit::FINDINGS));
    assert_eq!(malea(&["lint", "--strict", path(&clean)]).status.code(), Some(exit::OK));
}

#[test]
fn eval_prints_the_table() {
    let case = fixtures().join("cases/ssl");
    let o = malea(&[
        "eval",
        path(&case.join("gold.csv")),
        path(&case.join("malea/mapping.csv")),
        path(&case.join("malea/requirements.jsonl")),
    ]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("ssl/malea"));
    assert!(stdout.contains("42.9"));
}

#[test]
fn coverage_reports_every_topic() {
    let reqs = fixtures().join("cases/fake-review/malea/requirements.jsonl");
    let o = malea(&["coverage", path(&reqs)]);
    assert_eq!(o.status.code(), Some(exit::OK));
    let stdout = String::from_utf8_lossy(&o.stdout);
    for topic in ["privacy", "accessibility", "traceability"] {
        assert!(stdout.contains(topic), "{stdout}");
    }
}

#[test]
fn missing_input_is_an_io_error() {
    let o = malea(&["lint", "/nonexistent/stories.md"]);
    assert_eq!(o.status.code(), Some(exit::IO));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(malea(&["eval", "a", "b"]).status.code(), Some(exit::CONFIG));
    assert_eq!(malea(&["frobnicate"]).status.code(), Some(exit::CONFIG));
}
