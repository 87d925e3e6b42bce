//! Commit-log parsing for two wire formats and the canonical jsonl
//! serializer used by round-trip tests.

use serde_json::Map;

use crate::error::{Error, Result};
use crate::relation::{BaseType, ColumnType, Record, Relation, Schema, Timestamp, Value};

/// Wire format of a commit log stream.
///
/// `Jsonl` is one JSON object per line with fully escaped strings; it is the
/// canonical interchange format. `GitRecords` is the raw byte stream the VCS
/// emits for the pretty format `%H%x1f%an%x1f%ae%x1f%aI%x1f%B%x1e`: fields
/// separated by the unit separator (0x1F), records terminated by the record
/// separator (0x1E).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommitFormat {
    Jsonl,
    GitRecords,
}

/// The schema every commit relation carries:
/// `{hash, author_name, author_email, timestamp, message}`.
pub fn commit_schema() -> Schema {
    Schema::new(vec![
        ("hash", ColumnType::required(BaseType::Text)),
        ("author_name", ColumnType::required(BaseType::Text)),
        ("author_email", ColumnType::required(BaseType::Text)),
        ("timestamp", ColumnType::required(BaseType::Timestamp)),
        ("message", ColumnType::required(BaseType::Text)),
    ])
    .expect("commit schema is well-formed")
}

/// Parses a commit log into a relation with [`commit_schema`], preserving
/// input order. Empty input yields an empty relation. Errors carry the
/// offending line (jsonl) or record (git-records) number.
pub fn parse_commit_log(input: &[u8], format: CommitFormat) -> Result<Relation> {
    let rows = match format {
        CommitFormat::Jsonl => parse_jsonl(input)?,
        CommitFormat::GitRecords => parse_git_records(input)?,
    };
    Ok(Relation::from_validated(commit_schema(), rows))
}

fn decode_utf8(input: &[u8]) -> Result<&str> {
    std::str::from_utf8(input).map_err(|e| Error::Ingest {
        record: 0,
        message: format!("input is not valid UTF-8: {e}"),
    })
}

fn parse_jsonl(input: &[u8]) -> Result<Vec<Record>> {
    let text = decode_utf8(input)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let object: Map<String, serde_json::Value> =
            serde_json::from_str(line).map_err(|e| Error::Ingest {
                record: line_no,
                message: format!("malformed JSON: {e}"),
            })?;
        let field = |name: &str| -> Result<&str> {
            match object.get(name) {
                Some(serde_json::Value::String(s)) => Ok(s),
                Some(_) => Err(Error::Ingest {
                    record: line_no,
                    message: format!("field {name:?} must be a string"),
                }),
                None => Err(Error::Ingest {
                    record: line_no,
                    message: format!("missing field {name:?}"),
                }),
            }
        };
        rows.push(build_commit_row(
            line_no,
            field("hash")?,
            field("author_name")?,
            field("author_email")?,
            field("timestamp")?,
            field("message")?,
        )?);
    }
    Ok(rows)
}

fn parse_git_records(input: &[u8]) -> Result<Vec<Record>> {
    let text = decode_utf8(input)?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut pieces: Vec<&str> = text.split('\u{1e}').collect();
    // Records are terminated, not separated: after the final record
    // separator only a trailing newline is tolerated.
    let tail = pieces.pop().expect("split yields at least one piece");
    if !tail.is_empty() && tail != "\n" {
        return Err(Error::Ingest {
            record: pieces.len() + 1,
            message: "unterminated record (missing trailing 0x1E)".to_string(),
        });
    }
    let mut rows = Vec::with_capacity(pieces.len());
    for (i, piece) in pieces.iter().enumerate() {
        let record_no = i + 1;
        let fields: Vec<&str> = piece.split('\u{1f}').collect();
        if fields.len() != 5 {
            return Err(Error::Ingest {
                record: record_no,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        // The VCS writes a newline between records, which lands in front of
        // the next record's hash field.
        let hash = fields[0].trim_start();
        rows.push(build_commit_row(
            record_no,
            hash, fields[1], fields[2], fields[3], fields[4],
        )?);
    }
    Ok(rows)
}

fn build_commit_row(
    record: usize,
    hash: &str,
    author_name: &str,
    author_email: &str,
    timestamp: &str,
    message: &str,
) -> Result<Record> {
    if hash.len() < 7 || hash.len() > 64 || !hash.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Ingest {
            record,
            message: format!("invalid commit hash {hash:?} (want 7-64 hex chars)"),
        });
    }
    let ts = Timestamp::parse(timestamp).map_err(|e| Error::Ingest {
        record,
        message: format!("bad timestamp {timestamp:?}: {e}"),
    })?;
    Ok(Record::new(vec![
        Value::text(hash),
        Value::text(author_name),
        Value::text(author_email),
        Value::Timestamp(ts),
        Value::text(message),
    ]))
}

/// Renders a commit relation back to the jsonl format, one record per line,
/// fields in schema order, timestamps in canonical UTC form. Inverse of
/// [`parse_commit_log`] for `CommitFormat::Jsonl`.
pub fn serialize_commits_jsonl(commits: &Relation) -> Result<String> {
    let expected = commit_schema();
    if commits.schema() != &expected {
        return Err(Error::Schema(
            "serialize_commits_jsonl requires the commit schema".to_string(),
        ));
    }
    let mut out = String::new();
    for row in commits.rows() {
        let mut object = Map::new();
        for (col, value) in expected.columns().iter().zip(&row.values) {
            let rendered = match value {
                Value::Text(s) => s.clone(),
                Value::Timestamp(ts) => ts.to_string(),
                other => {
                    return Err(Error::Type(format!(
                        "unexpected {other:?} in commit relation"
                    )))
                }
            };
            object.insert(col.name.clone(), serde_json::Value::String(rendered));
        }
        out.push_str(&serde_json::to_string(&object).expect("string map serializes"));
        out.push('\n');
    }
    Ok(out)
}
