//! The only place the VCS command line is invoked. Library crates parse
//! byte streams; this module produces one from a checkout.

use std::io;
use std::path::Path;
use std::process::{Command, Output};

use repoforge_core::{Error, Result};

/// Pretty format producing unit-separator-delimited fields and
/// record-separator-terminated records, matching the `git_records` parser.
pub const PRETTY_FORMAT: &str = "--pretty=format:%H%x1f%an%x1f%ae%x1f%aI%x1f%B%x1e";

fn run_git(repo: &Path, args: &[&str]) -> Result<Output> {
    let mut command = Command::new("git");
    command.arg("-C").arg(repo).args(args);
    Ok(command.output()?)
}

/// Full history of `repo` in the git-records byte format. A repository
/// with no commits yields an empty stream; a directory that is not a
/// repository (or a failing `git`) is an error.
pub fn git_log_records(repo: &Path) -> Result<Vec<u8>> {
    let log = run_git(repo, &["log", PRETTY_FORMAT])?;
    if log.status.success() {
        return Ok(log.stdout);
    }
    // `git log` fails when HEAD has no commits yet; that is an empty
    // project, not an error.
    let probe = run_git(repo, &["rev-parse", "--git-dir"])?;
    if probe.status.success() {
        return Ok(Vec::new());
    }
    let stderr = String::from_utf8_lossy(&log.stderr);
    Err(Error::Io(io::Error::other(format!(
        "git log failed for {}: {}",
        repo.display(),
        stderr.trim()
    ))))
}
