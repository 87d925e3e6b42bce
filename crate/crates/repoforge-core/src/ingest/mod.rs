//! Data collection: parsers that turn commit logs and issue-tracker exports
//! into relations, plus developer-identity normalization.

mod commit;
mod identity;
mod issue;

pub use commit::{
    commit_schema, parse_commit_log, serialize_commits_jsonl, CommitFormat,
};
pub use identity::{normalize_identity, IdentityRule};
pub use issue::{issue_schema, parse_issue_export};
