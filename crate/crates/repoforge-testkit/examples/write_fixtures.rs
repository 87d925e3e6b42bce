//! Writes the pinned corpus files to a directory (default `fixtures/`).
//! The checked-in files must stay byte-identical to this output; a test
//! guards the equivalence, and this example regenerates them after
//! deliberate manifest changes.

use std::env;
use std::fs;
use std::path::PathBuf;

use repoforge_testkit::fixture;

fn main() {
    let dir = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    fs::create_dir_all(&dir).expect("create output directory");

    let manifest = fixture::commit_manifest();
    fs::write(dir.join("commits.jsonl"), fixture::commits_jsonl()).unwrap();
    fs::write(dir.join("log.records"), fixture::commits_to_git_records(&manifest)).unwrap();
    fs::write(dir.join("issues.json"), fixture::issues_json()).unwrap();
    fs::write(dir.join("aliases.json"), fixture::aliases_json()).unwrap();
    println!("wrote pinned corpus to {}", dir.display());
}
