//! Records a session from scripted agent turns, for bundled fixtures.
//!
//! Usage: record_session <SCRIPT_DIR> <DESCRIPTION> <OUTPUT_DIR>
//!
//! SCRIPT_DIR holds one file per agent turn; files are replayed in name
//! order. The output directory gets the usual run artifacts plus
//! cassette.jsonl. Rerun after changing personas, since the cassette keys
//! on the full request.

use std::fs;
use std::path::PathBuf;

use malea_cli::{cmd_run, RunArgs};
use malea_core::provider::ScriptedProvider;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [script, description, output] = args.as_slice() else {
        eprintln!("usage: record_session <SCRIPT_DIR> <DESCRIPTION> <OUTPUT_DIR>");
        std::process::exit(2);
    };
    let mut turns: Vec<PathBuf> = fs::read_dir(script)
        .expect("script dir")
        .map(|e| e.expect("dir entry").path())
        .collect();
    turns.sort();
    let replies: Vec<String> = turns.iter().map(|p| fs::read_to_string(p).expect("turn file")).collect();
    let provider = ScriptedProvider::new(replies);
    let run = RunArgs {
        description: description.into(),
        config: None,
        output: output.into(),
        baseline: false,
        replay: None,
        record: true,
        seed: None,
        max_cycles: None,
        personas: None,
        force: true,
    };
    let code = match cmd_run(&run, Some(&provider), &mut std::io::stdout()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
