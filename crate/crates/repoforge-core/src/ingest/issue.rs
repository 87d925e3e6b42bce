//! Issue-tracker export parsing: a JSON array of issue objects becomes a
//! typed relation.

use crate::error::{Error, Result};
use crate::relation::{BaseType, ColumnType, Record, Relation, Schema, Timestamp, Value};

/// The schema of an issue relation. `priority`, `resolution`, the assignee
/// fields, and `resolved_at` are optional in exports and nullable here.
pub fn issue_schema() -> Schema {
    Schema::new(vec![
        ("key", ColumnType::required(BaseType::Text)),
        ("type", ColumnType::required(BaseType::Text)),
        ("priority", ColumnType::nullable(BaseType::Text)),
        ("status", ColumnType::required(BaseType::Text)),
        ("resolution", ColumnType::nullable(BaseType::Text)),
        ("assignee_name", ColumnType::nullable(BaseType::Text)),
        ("assignee_email", ColumnType::nullable(BaseType::Text)),
        ("created_at", ColumnType::required(BaseType::Timestamp)),
        ("resolved_at", ColumnType::nullable(BaseType::Timestamp)),
    ])
    .expect("issue schema is well-formed")
}

fn valid_key(key: &str) -> bool {
    // Project token (uppercase alphanumeric starting with a letter), a
    // hyphen, then digits: the same grammar link rules match in messages.
    let Some((token, number)) = key.split_once('-') else {
        return false;
    };
    let mut chars = token.chars();
    let starts_upper = chars.next().is_some_and(|c| c.is_ascii_uppercase());
    starts_upper
        && token
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
        && !number.is_empty()
        && number.bytes().all(|b| b.is_ascii_digit())
}

/// Parses a JSON array of issue objects into a relation with
/// [`issue_schema`], preserving document order. Missing optional fields and
/// JSON nulls become Null. Unknown fields are ignored.
pub fn parse_issue_export(input: &[u8]) -> Result<Relation> {
    let document: serde_json::Value =
        serde_json::from_slice(input).map_err(|e| Error::Ingest {
            record: 0,
            message: format!("malformed issue export: {e}"),
        })?;
    let items = document.as_array().ok_or_else(|| Error::Ingest {
        record: 0,
        message: "issue export must be a JSON array".to_string(),
    })?;

    let mut rows = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let record = i + 1;
        let object = item.as_object().ok_or_else(|| Error::Ingest {
            record,
            message: "issue entry must be a JSON object".to_string(),
        })?;

        let required = |name: &str| -> Result<&str> {
            match object.get(name) {
                Some(serde_json::Value::String(s)) => Ok(s),
                Some(serde_json::Value::Null) | None => Err(Error::Ingest {
                    record,
                    message: format!("missing required field {name:?}"),
                }),
                Some(_) => Err(Error::Ingest {
                    record,
                    message: format!("field {name:?} must be a string"),
                }),
            }
        };
        let optional = |name: &str| -> Result<Option<&str>> {
            match object.get(name) {
                Some(serde_json::Value::String(s)) => Ok(Some(s)),
                Some(serde_json::Value::Null) | None => Ok(None),
                Some(_) => Err(Error::Ingest {
                    record,
                    message: format!("field {name:?} must be a string or null"),
                }),
            }
        };

        let key = required("key")?;
        if !valid_key(key) {
            return Err(Error::Ingest {
                record,
                message: format!("invalid issue key {key:?} (want TOKEN-digits)"),
            });
        }
        let key = key.to_string();

        let parse_ts = |name: &str, text: &str| -> Result<Timestamp> {
            Timestamp::parse(text).map_err(|e| Error::Ingest {
                record,
                message: format!("issue {key}: bad {name} {text:?}: {e}"),
            })
        };
        let created_at = parse_ts("created_at", required("created_at")?)?;
        let resolved_at = match optional("resolved_at")? {
            Some(text) => Some(parse_ts("resolved_at", text)?),
            None => None,
        };
        if let Some(resolved) = resolved_at {
            if resolved < created_at {
                return Err(Error::Ingest {
                    record,
                    message: format!(
                        "issue {key}: resolved_at {resolved} is earlier than created_at {created_at}"
                    ),
                });
            }
        }

        let text_or_null =
            |v: Option<&str>| v.map(Value::text).unwrap_or(Value::Null);
        rows.push(Record::new(vec![
            Value::Text(key),
            Value::text(required("type")?),
            text_or_null(optional("priority")?),
            Value::text(required("status")?),
            text_or_null(optional("resolution")?),
            text_or_null(optional("assignee_name")?),
            text_or_null(optional("assignee_email")?),
            Value::Timestamp(created_at),
            resolved_at.map(Value::Timestamp).unwrap_or(Value::Null),
        ]));
    }
    Ok(Relation::from_validated(issue_schema(), rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_array_yields_empty_relation() {
        let rel = parse_issue_export(b"[]").unwrap();
        assert!(rel.is_empty());
        assert_eq!(rel.schema(), &issue_schema());
    }

    #[test]
    fn missing_optionals_become_null() {
        let doc = serde_json::json!([{
            "key": "FORGE-3",
            "type": "Bug",
            "status": "Open",
            "created_at": "2017-02-01T00:00:00Z",
            "priority": null,
        }]);
        let rel = parse_issue_export(doc.to_string().as_bytes()).unwrap();
        let row = &rel.rows()[0];
        assert_eq!(row.values[0], Value::text("FORGE-3"));
        assert_eq!(row.values[2], Value::Null, "explicit null priority");
        assert_eq!(row.values[5], Value::Null, "absent assignee_name");
        assert_eq!(row.values[8], Value::Null, "absent resolved_at");
    }

    #[test]
    fn key_grammar_is_enforced() {
        for key in ["forge-1", "FORGE", "FORGE-", "-1", "FORGE-1x", "1ORGE-2"] {
            let doc = serde_json::json!([{
                "key": key,
                "type": "Bug",
                "status": "Open",
                "created_at": "2017-02-01T00:00:00Z",
            }]);
            let err = parse_issue_export(doc.to_string().as_bytes()).unwrap_err();
            assert!(err.to_string().contains("issue key"), "{key:?}: {err}");
        }
        assert!(valid_key("A2B-10"));
        assert!(valid_key("GORA-12"));
    }

    #[test]
    fn resolved_before_created_is_an_error_with_the_key() {
        let doc = serde_json::json!([{
            "key": "FORGE-9",
            "type": "Bug",
            "status": "Resolved",
            "created_at": "2017-02-10T00:00:00Z",
            "resolved_at": "2017-02-01T00:00:00Z",
        }]);
        let err = parse_issue_export(doc.to_string().as_bytes()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("FORGE-9"), "{text}");
        assert!(text.contains("earlier than created_at"), "{text}");
    }

    #[test]
    fn non_array_document_is_an_error() {
        assert!(parse_issue_export(b"{}").is_err());
        assert!(parse_issue_export(b"not json").is_err());
        assert!(parse_issue_export(b"[42]").is_err());
    }
}
