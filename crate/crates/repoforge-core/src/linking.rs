//! Issue–commit linking and the case-study composite: which developer
//! commits most, and how many resolved critical issues trace back to them.

use std::collections::{HashMap, HashSet};

use regex::Regex;

use crate::algebra;
use crate::error::{Error, Result};
use crate::ingest::{normalize_identity, IdentityRule};
use crate::mining;
use crate::relation::{BaseType, Column, ColumnType, Record, Relation, Schema, Value};

/// How issue keys are recognized inside commit messages.
///
/// The pattern must contain exactly one capture group, which captures the
/// key. The default matches an uppercase project token, a hyphen, and
/// digits.
#[derive(Debug, Clone)]
pub struct LinkRule {
    regex: Regex,
}

/// The linking method recorded on every link row. Message scanning is the
/// only method in this version.
pub const LINK_METHOD: &str = "message-key-match";

/// Default issue-key pattern: uppercase project token, hyphen, digits.
pub const DEFAULT_KEY_PATTERN: &str = r"\b([A-Z][A-Z0-9]+-[0-9]+)\b";

impl LinkRule {
    /// Compiles `pattern` and checks it has exactly one capture group.
    pub fn new(pattern: &str) -> Result<Self> {
        let regex = Regex::new(pattern)
            .map_err(|e| Error::Pattern(format!("invalid key pattern: {e}")))?;
        // captures_len counts the implicit whole-match group.
        if regex.captures_len() != 2 {
            return Err(Error::Pattern(format!(
                "key pattern must have exactly one capture group, found {}",
                regex.captures_len() - 1
            )));
        }
        Ok(LinkRule { regex })
    }

    pub fn pattern(&self) -> &str {
        self.regex.as_str()
    }
}

impl Default for LinkRule {
    fn default() -> Self {
        LinkRule::new(DEFAULT_KEY_PATTERN).expect("default pattern is valid")
    }
}

fn require_text(rel: &Relation, column: &str) -> Result<usize> {
    let index = rel.schema().require(column)?;
    let base = rel.schema().columns()[index].ty.base;
    if base != BaseType::Text {
        return Err(Error::Schema(format!(
            "column {column:?} must be text, found {base}"
        )));
    }
    Ok(index)
}

/// Scans each commit message for issue keys and emits one link row per
/// (commit, distinct key) where the key exists in `issues`.
///
/// Keys mentioned twice in one message link once; keys absent from the
/// issue relation are dropped. Output schema is
/// `{commit_hash, issue_key, method}`, ordered by commit order then key
/// ascending.
pub fn link_issues(commits: &Relation, issues: &Relation, rule: &LinkRule) -> Result<Relation> {
    let hash_index = require_text(commits, "hash")?;
    let message_index = require_text(commits, "message")?;
    let key_index = require_text(issues, "key")?;

    let known_keys: HashSet<&str> = issues
        .rows()
        .iter()
        .filter_map(|row| match &row.values[key_index] {
            Value::Text(key) => Some(key.as_str()),
            _ => None,
        })
        .collect();

    let hash_nullable = commits.schema().columns()[hash_index].ty.nullable;
    let schema = Schema::new(vec![
        Column {
            name: "commit_hash".to_string(),
            ty: ColumnType {
                base: BaseType::Text,
                nullable: hash_nullable,
            },
        },
        Column {
            name: "issue_key".to_string(),
            ty: ColumnType::required(BaseType::Text),
        },
        Column {
            name: "method".to_string(),
            ty: ColumnType::required(BaseType::Text),
        },
    ])?;

    let mut rows = Vec::new();
    for commit in commits.rows() {
        let message = match &commit.values[message_index] {
            Value::Text(m) => m,
            _ => continue,
        };
        let mut keys: Vec<&str> = Vec::new();
        for captures in rule.regex.captures_iter(message) {
            if let Some(matched) = captures.get(1) {
                let key = matched.as_str();
                if known_keys.contains(key) && !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
        keys.sort_unstable();
        for key in keys {
            rows.push(Record::new(vec![
                commit.values[hash_index].clone(),
                Value::text(key),
                Value::text(LINK_METHOD),
            ]));
        }
    }
    Ok(Relation::from_validated(schema, rows))
}

fn is_resolved_status(status: &Value) -> bool {
    match status {
        Value::Text(s) => {
            s.eq_ignore_ascii_case("resolved") || s.eq_ignore_ascii_case("closed")
        }
        _ => false,
    }
}

fn field_matches(cell: &Value, wanted: &str) -> bool {
    match cell {
        Value::Text(s) => s.to_lowercase() == wanted.to_lowercase(),
        _ => false,
    }
}

/// Keeps issues matching a requested priority (case-insensitive; `None`
/// keeps all priorities, Null priorities match no request) and, when
/// `require_resolved`, a status in the resolved set {Resolved, Closed},
/// also case-insensitive.
pub fn resolved_issue_filter(
    issues: &Relation,
    priority: Option<&str>,
    require_resolved: bool,
) -> Result<Relation> {
    issue_field_filter(issues, "priority", priority, require_resolved)
}

/// Generalization of [`resolved_issue_filter`] over any text column of the
/// issue relation, used to filter by `type` instead of `priority`.
pub fn issue_field_filter(
    issues: &Relation,
    column: &str,
    wanted: Option<&str>,
    require_resolved: bool,
) -> Result<Relation> {
    let field_index = require_text(issues, column)?;
    let status_index = require_text(issues, "status")?;
    let rows = issues
        .rows()
        .iter()
        .filter(|row| {
            let field_ok = match wanted {
                Some(value) => field_matches(&row.values[field_index], value),
                None => true,
            };
            let status_ok = !require_resolved || is_resolved_status(&row.values[status_index]);
            field_ok && status_ok
        })
        .cloned()
        .collect();
    Ok(Relation::from_validated(issues.schema().clone(), rows))
}

/// The distinct issues with at least one linked commit authored by
/// `developer_id`. An issue linked from several of the developer's commits
/// appears once; rows keep the issue relation's order.
pub fn issues_resolved_by(
    commits: &Relation,
    issues: &Relation,
    links: &Relation,
    developer_id: &str,
) -> Result<Relation> {
    let hash_index = require_text(commits, "hash")?;
    let dev_index = require_text(commits, "developer_id")?;
    let link_hash_index = require_text(links, "commit_hash")?;
    let link_key_index = require_text(links, "issue_key")?;
    let key_index = require_text(issues, "key")?;

    let developer_hashes: HashSet<&str> = commits
        .rows()
        .iter()
        .filter(|row| matches!(&row.values[dev_index], Value::Text(id) if id == developer_id))
        .filter_map(|row| match &row.values[hash_index] {
            Value::Text(hash) => Some(hash.as_str()),
            _ => None,
        })
        .collect();

    let linked_keys: HashSet<&str> = links
        .rows()
        .iter()
        .filter(|row| {
            matches!(&row.values[link_hash_index],
                     Value::Text(hash) if developer_hashes.contains(hash.as_str()))
        })
        .filter_map(|row| match &row.values[link_key_index] {
            Value::Text(key) => Some(key.as_str()),
            _ => None,
        })
        .collect();

    let mut seen: HashSet<&str> = HashSet::new();
    let mut rows = Vec::new();
    for row in issues.rows() {
        if let Value::Text(key) = &row.values[key_index] {
            if linked_keys.contains(key.as_str()) && seen.insert(key.as_str()) {
                rows.push(row.clone());
            }
        }
    }
    Ok(Relation::from_validated(issues.schema().clone(), rows))
}

/// A developer as reported: display name plus canonical email id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    pub email: String,
}

/// Result of the case study over one project corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseStudyReport {
    pub project: String,
    pub total_commits: i64,
    pub frequent_committer: Option<Identity>,
    pub committer_commit_count: i64,
    pub critical_issues_resolved: i64,
}

impl CaseStudyReport {
    fn empty(project: String) -> Self {
        CaseStudyReport {
            project,
            total_commits: 0,
            frequent_committer: None,
            committer_commit_count: 0,
            critical_issues_resolved: 0,
        }
    }
}

/// How resolved issues are attributed to the frequent committer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Attribution {
    /// The developer authored at least one commit linked to the issue.
    /// This follows the case study's data flow through commit messages.
    #[default]
    Author,
    /// The issue's assignee email canonicalizes to the developer's id.
    Assignee,
}

/// Which issue population counts as "critical".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueFilter {
    /// Issues whose priority equals the value case-insensitively; `None`
    /// accepts every priority.
    Priority(Option<String>),
    /// Issues whose type equals the value case-insensitively, e.g. "Bug".
    Type(String),
}

impl Default for IssueFilter {
    fn default() -> Self {
        IssueFilter::Priority(Some("Critical".to_string()))
    }
}

/// Tuning knobs for [`run_case_study`]. The defaults reproduce
/// [`critical_issues_by_frequent_committer`].
#[derive(Debug, Clone)]
pub struct CaseStudyOptions {
    pub project: String,
    pub link_rule: LinkRule,
    pub identity: IdentityRule,
    pub filter: IssueFilter,
    pub attribution: Attribution,
}

impl CaseStudyOptions {
    pub fn new(project: impl Into<String>) -> Self {
        CaseStudyOptions {
            project: project.into(),
            link_rule: LinkRule::default(),
            identity: IdentityRule::default(),
            filter: IssueFilter::default(),
            attribution: Attribution::default(),
        }
    }
}

/// The case-study composite in its simplest form: identity normalization
/// with the default rule, the given link rule and priority, commit-author
/// attribution. The project name in the report is left empty; callers that
/// know it use [`run_case_study`].
pub fn critical_issues_by_frequent_committer(
    commits: &Relation,
    issues: &Relation,
    rule: &LinkRule,
    priority: &str,
) -> Result<CaseStudyReport> {
    let mut options = CaseStudyOptions::new("");
    options.link_rule = rule.clone();
    options.filter = IssueFilter::Priority(Some(priority.to_string()));
    run_case_study(commits, issues, &options)
}

/// Runs the full pipeline: normalize identities, find the most frequent
/// committer, link issues to commits, filter to resolved issues in the
/// requested population, attribute them, count.
pub fn run_case_study(
    commits: &Relation,
    issues: &Relation,
    options: &CaseStudyOptions,
) -> Result<CaseStudyReport> {
    let total_commits = algebra::count(commits);
    if total_commits == 0 {
        return Ok(CaseStudyReport::empty(options.project.clone()));
    }

    let normalized = normalize_identity(commits, &options.identity)?;
    let top = match mining::find_max(&normalized, "developer_id")? {
        Some(entry) => entry,
        None => return Ok(CaseStudyReport::empty(options.project.clone())),
    };
    let developer_id = match &top.key {
        Value::Text(id) => id.clone(),
        // A Null id means the most frequent author has no usable email;
        // nothing can be attributed to them.
        _ => {
            let mut report = CaseStudyReport::empty(options.project.clone());
            report.total_commits = total_commits;
            report.committer_commit_count = top.count;
            return Ok(report);
        }
    };

    let eligible = match &options.filter {
        IssueFilter::Priority(priority) => {
            issue_field_filter(issues, "priority", priority.as_deref(), true)?
        }
        IssueFilter::Type(kind) => issue_field_filter(issues, "type", Some(kind), true)?,
    };

    let resolved_count = match options.attribution {
        Attribution::Author => {
            let links = link_issues(&normalized, issues, &options.link_rule)?;
            let resolved = issues_resolved_by(&normalized, &eligible, &links, &developer_id)?;
            algebra::count(&resolved)
        }
        Attribution::Assignee => {
            let email_index = require_text(&eligible, "assignee_email")?;
            let key_index = require_text(&eligible, "key")?;
            let mut seen: HashSet<&str> = HashSet::new();
            let mut count = 0;
            for row in eligible.rows() {
                let assigned = matches!(
                    &row.values[email_index],
                    Value::Text(email) if options.identity.canonical_id(email) == developer_id
                );
                if assigned {
                    if let Value::Text(key) = &row.values[key_index] {
                        if seen.insert(key.as_str()) {
                            count += 1;
                        }
                    }
                }
            }
            count
        }
    };

    Ok(CaseStudyReport {
        project: options.project.clone(),
        total_commits,
        frequent_committer: Some(Identity {
            name: display_name(&normalized, &developer_id),
            email: developer_id,
        }),
        committer_commit_count: top.count,
        critical_issues_resolved: resolved_count,
    })
}

/// The display name shown for a developer id: the most frequent
/// `author_name` on their commits, ties broken by the lexicographically
/// smallest name so the report is invariant under commit permutation.
fn display_name(normalized: &Relation, developer_id: &str) -> String {
    let name_index = normalized
        .schema()
        .index_of("author_name")
        .expect("normalize_identity requires author_name");
    let dev_index = normalized
        .schema()
        .index_of("developer_id")
        .expect("normalized relation has developer_id");
    let mut tallies: HashMap<&str, i64> = HashMap::new();
    for row in normalized.rows() {
        if let (Value::Text(id), Value::Text(name)) =
            (&row.values[dev_index], &row.values[name_index])
        {
            if id == developer_id {
                *tallies.entry(name.as_str()).or_insert(0) += 1;
            }
        }
    }
    tallies
        .into_iter()
        .max_by(|(na, ca), (nb, cb)| ca.cmp(cb).then_with(|| nb.cmp(na)))
        .map(|(name, _)| name.to_string())
        .unwrap_or_default()
}
