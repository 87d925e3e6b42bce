//! The pinned corpus parses back to exactly the fields its manifest
//! declares, in both commit encodings, and serialization is a fixpoint.

use repoforge_core::ingest::{
    parse_commit_log, parse_issue_export, serialize_commits_jsonl, CommitFormat, IdentityRule,
};
use repoforge_core::Value;
use repoforge_testkit::fixture;

fn text(value: &Value) -> &str {
    value.as_text().expect("text value")
}

fn ts(value: &Value) -> String {
    match value {
        Value::Timestamp(t) => t.to_string(),
        other => panic!("expected timestamp, got {other:?}"),
    }
}

#[test]
fn jsonl_recovers_every_manifest_field() {
    let manifest = fixture::commit_manifest();
    let rel = parse_commit_log(fixture::commits_jsonl().as_bytes(), CommitFormat::Jsonl).unwrap();
    assert_eq!(rel.len() as i64, fixture::TOTAL_COMMITS);
    for (row, plain) in rel.rows().iter().zip(&manifest) {
        assert_eq!(text(&row.values[0]), plain.hash);
        assert_eq!(text(&row.values[1]), plain.author_name);
        assert_eq!(text(&row.values[2]), plain.author_email);
        assert_eq!(ts(&row.values[3]), plain.timestamp_canonical);
        assert_eq!(text(&row.values[4]), plain.message);
    }
}

#[test]
fn git_records_and_jsonl_agree() {
    let manifest = fixture::commit_manifest();
    let jsonl =
        parse_commit_log(fixture::commits_jsonl().as_bytes(), CommitFormat::Jsonl).unwrap();
    let records = parse_commit_log(
        &fixture::commits_to_git_records(&manifest),
        CommitFormat::GitRecords,
    )
    .unwrap();
    assert_eq!(jsonl, records);
}

#[test]
fn offsets_normalize_to_utc() {
    let manifest = fixture::commit_manifest();
    // The first two commits are written with +05:30 and -05:00 offsets.
    for plain in &manifest[..2] {
        assert_ne!(plain.timestamp, plain.timestamp_canonical);
        assert!(plain.timestamp_canonical.ends_with('Z'));
    }
    let rel = parse_commit_log(fixture::commits_jsonl().as_bytes(), CommitFormat::Jsonl).unwrap();
    assert_eq!(ts(&rel.rows()[0].values[3]), manifest[0].timestamp_canonical);
    assert_eq!(ts(&rel.rows()[1].values[3]), manifest[1].timestamp_canonical);
}

#[test]
fn serialization_is_a_fixpoint() {
    let rel = parse_commit_log(fixture::commits_jsonl().as_bytes(), CommitFormat::Jsonl).unwrap();
    let first = serialize_commits_jsonl(&rel).unwrap();
    let reparsed = parse_commit_log(first.as_bytes(), CommitFormat::Jsonl).unwrap();
    assert_eq!(rel, reparsed);
    let second = serialize_commits_jsonl(&reparsed).unwrap();
    assert_eq!(first, second, "serializing twice must give identical bytes");
}

#[test]
fn issue_export_recovers_fields_and_nulls() {
    let manifest = fixture::issue_manifest();
    let rel = parse_issue_export(fixture::issues_json().as_bytes()).unwrap();
    assert_eq!(rel.len() as i64, fixture::TOTAL_ISSUES);

    let schema = rel.schema();
    let col = |name: &str| schema.require(name).unwrap();
    for (row, plain) in rel.rows().iter().zip(&manifest) {
        assert_eq!(text(&row.values[col("key")]), plain.key);
        assert_eq!(text(&row.values[col("type")]), plain.kind);
        assert_eq!(text(&row.values[col("status")]), plain.status);
        match &plain.priority {
            Some(p) => assert_eq!(text(&row.values[col("priority")]), p),
            None => assert!(row.values[col("priority")].is_null(), "{}", plain.key),
        }
        // Manifest timestamps are written in short form; the engine
        // renders canonical microsecond-precision UTC.
        let canonical = |s: &str| {
            repoforge_core::Timestamp::parse(s).unwrap().to_string()
        };
        match &plain.resolved_at {
            Some(t) => assert_eq!(ts(&row.values[col("resolved_at")]), canonical(t)),
            None => assert!(row.values[col("resolved_at")].is_null(), "{}", plain.key),
        }
        assert_eq!(ts(&row.values[col("created_at")]), canonical(&plain.created_at));
    }
}

#[test]
fn alias_file_maps_case_variants() {
    let rule = IdentityRule::from_json(fixture::aliases_json().as_bytes()).unwrap();
    assert_eq!(rule.canonical_id("A@X.ORG"), "a@x.org");
    assert_eq!(rule.canonical_id("a@x.org"), "a@x.org");
    assert_eq!(rule.canonical_id("Unknown@Elsewhere.example"), "unknown@elsewhere.example");
}
