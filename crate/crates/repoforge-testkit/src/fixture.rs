//! The deterministic fixture corpus: 20 commits by 4 developers (3 of whom
//! commit under two email case variants), 8 issues, 9 embedded issue-key
//! mentions of which 1 dangles. Every expected value here was derived by
//! hand from the manifests below; tests compare engine output against these
//! constants and against the independent oracles in [`crate::oracle`].

use repoforge_core::ingest::{self, CommitFormat};
use repoforge_core::relation::Relation;

/// One commit as written into fixture files. `timestamp` is the form
/// written on disk (offsets vary to exercise normalization);
/// `timestamp_canonical` is the equivalent canonical UTC rendering.
#[derive(Debug, Clone)]
pub struct PlainCommit {
    pub hash: String,
    pub author_name: String,
    pub author_email: String,
    pub timestamp: String,
    pub timestamp_canonical: String,
    pub message: String,
}

/// One issue as written into the fixture export. Optional fields are `None`
/// when the export omits them.
#[derive(Debug, Clone)]
pub struct PlainIssue {
    pub key: String,
    pub kind: String,
    pub priority: Option<String>,
    pub status: String,
    pub resolution: Option<String>,
    pub assignee_name: Option<String>,
    pub assignee_email: Option<String>,
    pub created_at: String,
    pub resolved_at: Option<String>,
}

pub const TOTAL_COMMITS: i64 = 20;
pub const TOTAL_ISSUES: i64 = 8;
pub const DISTINCT_DEVELOPERS: usize = 4;
/// Three developers commit under two case variants of one address each.
pub const ALIAS_PAIRS: usize = 3;

pub const DEV_A_ID: &str = "a@x.org";
pub const DEV_A_NAME: &str = "Alice Archer";
pub const DEV_A_COMMITS: i64 = 8;
/// Rows where `author_email` equals `a@x.org` byte-for-byte (the three
/// `A@X.ORG` commits do not match without normalization).
pub const DEV_A_EXACT_EMAIL_ROWS: i64 = 5;

/// Developer ranking after identity normalization: (id, commits).
pub const RANKING: [(&str, i64); 4] = [
    ("a@x.org", 8),
    ("b@x.org", 6),
    ("c@x.org", 4),
    ("d@x.org", 2),
];

/// Expected links (commit index, issue key), ordered by commit order then
/// key ascending. The FORGE-99 mention in commit 1 dangles and is dropped.
pub const LINKS: [(usize, &str); 8] = [
    (0, "FORGE-1"),
    (2, "FORGE-1"),
    (3, "FORGE-2"),
    (5, "FORGE-8"),
    (8, "FORGE-4"),
    (9, "FORGE-3"),
    (14, "FORGE-5"),
    (18, "FORGE-7"),
];

/// Issues with Critical priority and Resolved/Closed status.
pub const RESOLVED_CRITICAL_ISSUES: [&str; 3] = ["FORGE-1", "FORGE-2", "FORGE-4"];
/// Of those, the ones linked from Developer A's commits (FORGE-8 is linked
/// but open; FORGE-4 is linked from a B commit).
pub const DEV_A_RESOLVED_CRITICAL: i64 = 2;

/// Half-open window containing exactly the first 10 commits.
pub const WINDOW_FROM: &str = "2017-03-01T00:00:00Z";
pub const WINDOW_TO: &str = "2017-03-11T00:00:00Z";
pub const WINDOW_ROWS: i64 = 10;

pub fn commit_hash(index: usize) -> String {
    format!("{:040x}", 0x1000 + index)
}

fn day(index: usize) -> String {
    // 2017-03-01 + index days; March has 31 days, so 20 commits stay inside
    // the month.
    format!("2017-03-{:02}T00:00:00", index + 1)
}

/// The 20-commit manifest. Commits 0 and 1 are written with non-UTC offsets
/// (same instants as their canonical forms); everything else is written in
/// `Z` form.
pub fn commit_manifest() -> Vec<PlainCommit> {
    // (author index, name override, written timestamp override, message)
    let authors = [
        "Alice Archer|a@x.org",
        "Bob Breaker|b@x.org",
        "Carol Coder|c@x.org",
        "Dan Datum|d@x.org",
        "Alice Archer|A@X.ORG",
        "Bob Breaker|B@X.ORG",
        "Carol Coder|C@X.ORG",
        "Alice A.|A@X.ORG",
    ];
    let plan: [(usize, &str); 20] = [
        (0, "Fix FORGE-1 crash on empty input; backport of FORGE-1 hotfix"),
        (0, "Track upstream FORGE-99 regression"),
        (0, "Add regression test for FORGE-1"),
        (0, "Refactor parser internals\n\nNo behavior change intended.\n\nFixes: FORGE-2"),
        (1, "refactor"),
        (0, "Quote \"raw\" bytes in log output (FORGE-8)"),
        (4, "Tune cache eviction thresholds"),
        (2, "Document the ingestion formats"),
        (1, "Repair index corruption after crash (FORGE-4)"),
        (2, "Investigate flaky watcher, relates to FORGE-3"),
        (1, "Bump dependency pins"),
        (2, "Simplify error plumbing"),
        (7, "Add developer onboarding notes"),
        (1, "Speed up cold-start scan"),
        (3, "Remove dead configuration keys; closes FORGE-5"),
        (6, "Normalize line endings in test data"),
        (7, "Rework release packaging"),
        (3, "Fix off-by-one in pagination"),
        (5, "Harden concurrent writer path\n\nStress-tested overnight.\nSee FORGE-7 for the incident report."),
        (5, "Polish CLI help output"),
    ];
    plan.iter()
        .enumerate()
        .map(|(i, &(author, message))| {
            let (name, email) = authors[author].split_once('|').unwrap();
            let written = match i {
                // Same instants as the Z forms below, expressed in offsets.
                0 => "2017-03-01T05:30:00+05:30".to_string(),
                1 => "2017-03-01T19:00:00-05:00".to_string(),
                _ => format!("{}Z", day(i)),
            };
            PlainCommit {
                hash: commit_hash(i),
                author_name: name.to_string(),
                author_email: email.to_string(),
                timestamp: written,
                timestamp_canonical: format!("{}.000000Z", day(i)),
                message: message.to_string(),
            }
        })
        .collect()
}

/// The 8-issue manifest. FORGE-1/2/4 are resolved Critical; FORGE-8 is
/// Critical but open; FORGE-7 has no priority; FORGE-6 is mentioned by no
/// commit.
pub fn issue_manifest() -> Vec<PlainIssue> {
    let spec: [(&str, &str, Option<&str>, &str, Option<&str>, Option<(&str, &str)>); 8] = [
        ("FORGE-1", "Bug", Some("Critical"), "Resolved", Some("Fixed"),
         Some(("Alice Archer", "a@x.org"))),
        ("FORGE-2", "Bug", Some("Critical"), "Closed", Some("Fixed"),
         Some(("Alice Archer", "a@x.org"))),
        ("FORGE-3", "Improvement", Some("Major"), "Open", None, None),
        ("FORGE-4", "Bug", Some("Critical"), "Resolved", Some("Fixed"),
         Some(("Bob Breaker", "b@x.org"))),
        ("FORGE-5", "Task", Some("Major"), "Resolved", Some("Done"),
         Some(("Dan Datum", "d@x.org"))),
        ("FORGE-6", "Bug", Some("Minor"), "Open", None, None),
        ("FORGE-7", "Bug", None, "Closed", Some("Won't Fix"), None),
        ("FORGE-8", "Bug", Some("Critical"), "Open", None,
         Some(("Alice Archer", "a@x.org"))),
    ];
    spec.iter()
        .enumerate()
        .map(|(i, &(key, kind, priority, status, resolution, assignee))| {
            let created = format!("2017-02-{:02}T00:00:00Z", i + 1);
            let resolved = matches!(status, "Resolved" | "Closed")
                .then(|| format!("2017-02-{:02}T00:00:00Z", i + 21));
            PlainIssue {
                key: key.to_string(),
                kind: kind.to_string(),
                priority: priority.map(str::to_string),
                status: status.to_string(),
                resolution: resolution.map(str::to_string),
                assignee_name: assignee.map(|(n, _)| n.to_string()),
                assignee_email: assignee.map(|(_, e)| e.to_string()),
                created_at: created,
                resolved_at: resolved,
            }
        })
        .collect()
}

/// Serializes commits in the jsonl interchange format, one object per line.
pub fn commits_to_jsonl(commits: &[PlainCommit]) -> String {
    let mut out = String::new();
    for c in commits {
        let mut object = serde_json::Map::new();
        object.insert("hash".into(), c.hash.clone().into());
        object.insert("author_name".into(), c.author_name.clone().into());
        object.insert("author_email".into(), c.author_email.clone().into());
        object.insert("timestamp".into(), c.timestamp.clone().into());
        object.insert("message".into(), c.message.clone().into());
        out.push_str(&serde_json::Value::Object(object).to_string());
        out.push('\n');
    }
    out
}

/// Serializes commits as the VCS byte stream (`%H%x1f%an%x1f%ae%x1f%aI%x1f%B%x1e`
/// records joined by newlines, as the VCS writes them).
pub fn commits_to_git_records(commits: &[PlainCommit]) -> Vec<u8> {
    let mut out = Vec::new();
    for (i, c) in commits.iter().enumerate() {
        if i > 0 {
            out.push(b'\n');
        }
        for (j, field) in [
            c.hash.as_str(),
            c.author_name.as_str(),
            c.author_email.as_str(),
            c.timestamp.as_str(),
            c.message.as_str(),
        ]
        .iter()
        .enumerate()
        {
            if j > 0 {
                out.push(0x1f);
            }
            out.extend_from_slice(field.as_bytes());
        }
        out.push(0x1e);
    }
    out.push(b'\n');
    out
}

/// Serializes issues as a JSON-array export. `None` fields are omitted or
/// written as JSON null in alternation, exercising both spellings.
pub fn issues_to_json(issues: &[PlainIssue]) -> String {
    let items: Vec<serde_json::Value> = issues
        .iter()
        .enumerate()
        .map(|(i, issue)| {
            let mut object = serde_json::Map::new();
            let mut optional = |name: &str, value: &Option<String>| match value {
                Some(v) => {
                    object.insert(name.into(), v.clone().into());
                }
                None if i % 2 == 0 => {
                    object.insert(name.into(), serde_json::Value::Null);
                }
                None => {}
            };
            optional("priority", &issue.priority);
            optional("resolution", &issue.resolution);
            optional("assignee_name", &issue.assignee_name);
            optional("assignee_email", &issue.assignee_email);
            optional("resolved_at", &issue.resolved_at);
            object.insert("key".into(), issue.key.clone().into());
            object.insert("type".into(), issue.kind.clone().into());
            object.insert("status".into(), issue.status.clone().into());
            object.insert("created_at".into(), issue.created_at.clone().into());
            serde_json::Value::Object(object)
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("issue export serializes")
}

/// Fixture commit log bytes (jsonl).
pub fn commits_jsonl() -> String {
    commits_to_jsonl(&commit_manifest())
}

/// Fixture issue export bytes.
pub fn issues_json() -> String {
    issues_to_json(&issue_manifest())
}

/// The fixture commits as a relation, via the ingest parser.
pub fn commits() -> Relation {
    ingest::parse_commit_log(commits_jsonl().as_bytes(), CommitFormat::Jsonl)
        .expect("fixture commit log parses")
}

/// The fixture issues as a relation, via the ingest parser.
pub fn issues() -> Relation {
    ingest::parse_issue_export(issues_json().as_bytes()).expect("fixture issue export parses")
}

/// An alias map that says explicitly what the lowercase rule already does
/// for the fixture; used to exercise the `--aliases` path.
pub fn aliases_json() -> String {
    serde_json::json!({
        "A@X.ORG": "a@x.org",
        "B@X.ORG": "b@x.org",
        "C@X.ORG": "c@x.org",
    })
    .to_string()
}
