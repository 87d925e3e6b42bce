//! Seeded random corpora: small synthetic projects with developer aliases,
//! messy issue metadata, and adversarial commit messages. Everything is
//! driven by an `StdRng` the caller seeds, so failures replay exactly.

use rand::rngs::StdRng;
use rand::Rng;

use crate::fixture::{PlainCommit, PlainIssue};
use repoforge_core::relation::Timestamp;

const PROJECTS: [&str; 4] = ["FORGE", "GORA", "LANG", "NET7"];
const WORDS: [&str; 12] = [
    "fix", "refactor", "speed", "up", "the", "watcher", "handle", "empty",
    "input", "cache", "tests", "docs",
];
const ADVERSARIAL: [&str; 6] = [
    "\n",
    "\"quoted\"",
    "\u{1f}",
    "\u{1e}",
    "tab\there",
    "naïve käse",
];

/// Micros for 2016-01-01T00:00:00Z and 2020-01-01T00:00:00Z.
const EPOCH_LO: i64 = 1_451_606_400_000_000;
const EPOCH_HI: i64 = 1_577_836_800_000_000;

fn canonical(micros: i64) -> String {
    Timestamp::from_micros(micros).to_string()
}

/// Renders `micros` as RFC 3339 with a fixed offset: the same instant as
/// [`canonical`], written the way a local clock would write it.
fn with_offset(micros: i64, offset_secs: i64, suffix: &str) -> String {
    let local = canonical(micros + offset_secs * 1_000_000);
    format!("{}{suffix}", local.trim_end_matches('Z'))
}

/// Generates up to `max` issues with unique keys. Metadata is deliberately
/// messy: mixed-case priorities and statuses, absent assignees, issues that
/// resolve and issues that never do.
pub fn random_issues(rng: &mut StdRng, max: usize) -> Vec<PlainIssue> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|i| {
            let project = PROJECTS[rng.random_range(0..PROJECTS.len())];
            let status = ["Open", "Resolved", "Closed", "In Progress", "resolved", "CLOSED"]
                [rng.random_range(0..6)];
            let priority = match rng.random_range(0..6) {
                0 => None,
                1 => Some("critical"),
                2 | 3 => Some("Critical"),
                4 => Some("Major"),
                _ => Some("Minor"),
            };
            let created = rng.random_range(EPOCH_LO..EPOCH_HI - 86_400_000_000 * 500);
            let resolved = (resolvedish(status) || rng.random_range(0..4) == 0)
                .then(|| created + rng.random_range(0..86_400_000_000 * 400));
            let assignee = (rng.random_range(0..3) > 0).then(|| {
                let d = rng.random_range(0..5);
                (format!("Dev {d}"), format!("dev{d}@proj.org"))
            });
            PlainIssue {
                key: format!("{project}-{}", i + 1),
                kind: ["Bug", "Task", "Improvement"][rng.random_range(0..3)].to_string(),
                priority: priority.map(str::to_string),
                status: status.to_string(),
                resolution: resolvedish(status).then(|| "Fixed".to_string()),
                assignee_name: assignee.as_ref().map(|(n, _)| n.clone()),
                assignee_email: assignee.as_ref().map(|(_, e)| e.clone()),
                created_at: canonical(created),
                resolved_at: resolved.map(canonical),
            }
        })
        .collect()
}

fn resolvedish(status: &str) -> bool {
    status.eq_ignore_ascii_case("resolved") || status.eq_ignore_ascii_case("closed")
}

/// Generates up to `max` commits over a small developer pool. Developers
/// appear under case-variant emails and name variants; messages mention
/// real issue keys, dangling keys, or none, and sometimes contain
/// newlines, quotes, field/record separator bytes, and non-ASCII text.
pub fn random_commits(rng: &mut StdRng, max: usize, issue_keys: &[String]) -> Vec<PlainCommit> {
    let n = rng.random_range(0..=max);
    let devs = rng.random_range(1..=5usize);
    (0..n)
        .map(|i| {
            let d = rng.random_range(0..devs);
            let email = if rng.random_range(0..3) == 0 {
                format!("DEV{d}@proj.org")
            } else {
                format!("dev{d}@proj.org")
            };
            let name = if rng.random_range(0..4) == 0 {
                format!("D. {d}")
            } else {
                format!("Dev {d}")
            };
            let micros = rng.random_range(EPOCH_LO..EPOCH_HI);
            let timestamp = match rng.random_range(0..4) {
                0 => with_offset(micros, 19_800, "+05:30"),
                1 => with_offset(micros, -28_800, "-08:00"),
                _ => canonical(micros),
            };
            PlainCommit {
                hash: format!("{:024x}{:016x}", rng.random::<u128>() >> 32, i),
                author_name: name,
                author_email: email,
                timestamp,
                timestamp_canonical: canonical(micros),
                message: random_message(rng, issue_keys),
            }
        })
        .collect()
}

fn random_message(rng: &mut StdRng, issue_keys: &[String]) -> String {
    let mut parts: Vec<String> = (0..rng.random_range(1..=5))
        .map(|_| WORDS[rng.random_range(0..WORDS.len())].to_string())
        .collect();
    for _ in 0..rng.random_range(0..=2) {
        let key = if issue_keys.is_empty() || rng.random_range(0..4) == 0 {
            // Dangling or malformed references that must not produce links.
            ["GONE-999", "forge-1", "X-1"][rng.random_range(0..3)].to_string()
        } else {
            issue_keys[rng.random_range(0..issue_keys.len())].clone()
        };
        parts.insert(rng.random_range(0..=parts.len()), key);
    }
    if rng.random_range(0..3) == 0 {
        let extra = ADVERSARIAL[rng.random_range(0..ADVERSARIAL.len())];
        parts.insert(rng.random_range(0..=parts.len()), extra.to_string());
    }
    parts.join(" ")
}

/// A full random project: issues first, then commits that may reference
/// their keys.
pub fn random_corpus(
    rng: &mut StdRng,
    max_commits: usize,
    max_issues: usize,
) -> (Vec<PlainCommit>, Vec<PlainIssue>) {
    let issues = random_issues(rng, max_issues);
    let keys: Vec<String> = issues.iter().map(|i| i.key.clone()).collect();
    let commits = random_commits(rng, max_commits, &keys);
    (commits, issues)
}
