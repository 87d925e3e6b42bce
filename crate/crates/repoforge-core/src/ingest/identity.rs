//! Developer-identity normalization. "Most frequent committer" is only
//! well-defined once the same person's aliases collapse to one id.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::relation::{BaseType, Column, ColumnType, Record, Relation, Schema, Value};

/// How author emails map to canonical developer ids.
///
/// The base rule lowercases the email; an optional alias map then rewrites
/// specific (lowercased) emails to a canonical address. Alias values must
/// themselves be canonical — a value that also appears as a key must map to
/// itself, so resolution never chains.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityRule {
    aliases: BTreeMap<String, String>,
}

impl IdentityRule {
    /// Builds a rule from explicit alias pairs. Keys and values are
    /// lowercased; chained aliases are rejected.
    pub fn with_aliases<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut aliases = BTreeMap::new();
        for (k, v) in pairs {
            let key = k.into().to_lowercase();
            let value = v.into().to_lowercase();
            if let Some(previous) = aliases.insert(key.clone(), value.clone()) {
                if previous != value {
                    return Err(Error::Value(format!(
                        "conflicting aliases for {key:?}: {previous:?} and {value:?}"
                    )));
                }
            }
        }
        for (key, value) in &aliases {
            if let Some(target) = aliases.get(value) {
                if target != value {
                    return Err(Error::Value(format!(
                        "alias chain: {key:?} -> {value:?} -> {target:?}; \
                         alias values must be canonical"
                    )));
                }
            }
        }
        Ok(IdentityRule { aliases })
    }

    /// Parses an alias-map file: a JSON object of email → canonical email.
    pub fn from_json(input: &[u8]) -> Result<Self> {
        let document: serde_json::Value =
            serde_json::from_slice(input).map_err(|e| Error::Ingest {
                record: 0,
                message: format!("malformed alias map: {e}"),
            })?;
        let object = document.as_object().ok_or_else(|| Error::Ingest {
            record: 0,
            message: "alias map must be a JSON object".to_string(),
        })?;
        let mut pairs = Vec::with_capacity(object.len());
        for (key, value) in object {
            let target = value.as_str().ok_or_else(|| Error::Ingest {
                record: 0,
                message: format!("alias target for {key:?} must be a string"),
            })?;
            pairs.push((key.clone(), target.to_string()));
        }
        Self::with_aliases(pairs)
    }

    /// The canonical developer id for an author email.
    pub fn canonical_id(&self, email: &str) -> String {
        let lowered = email.to_lowercase();
        match self.aliases.get(&lowered) {
            Some(canonical) => canonical.clone(),
            None => lowered,
        }
    }
}

/// Appends a `developer_id` column computed from `author_email` by `rule`.
/// Row count and order are unchanged. The input must not already carry a
/// `developer_id` column.
pub fn normalize_identity(commits: &Relation, rule: &IdentityRule) -> Result<Relation> {
    let email_index = commits.schema().require("author_email")?;
    commits.schema().require("author_name")?;
    let email_col = &commits.schema().columns()[email_index];
    if email_col.ty.base != BaseType::Text {
        return Err(Error::Schema(format!(
            "author_email must be text, found {}",
            email_col.ty.base
        )));
    }
    if commits.schema().index_of("developer_id").is_some() {
        return Err(Error::Schema(
            "relation already has a developer_id column".to_string(),
        ));
    }

    let mut columns = commits.schema().columns().to_vec();
    columns.push(Column {
        name: "developer_id".to_string(),
        ty: ColumnType {
            base: BaseType::Text,
            nullable: email_col.ty.nullable,
        },
    });
    let schema = Schema::new(columns)?;

    let rows = commits
        .rows()
        .iter()
        .map(|row| {
            let id = match &row.values[email_index] {
                Value::Text(email) => Value::Text(rule.canonical_id(email)),
                Value::Null => Value::Null,
                other => unreachable!("schema guarantees text, found {other:?}"),
            };
            let mut values = row.values.clone();
            values.push(id);
            Record::new(values)
        })
        .collect();
    Ok(Relation::from_validated(schema, rows))
}
