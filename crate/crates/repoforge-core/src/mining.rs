//! Mining operators composed from the algebra layer: frequency ranking over
//! a key column, the most/least-frequent entry, top-k truncation, and
//! half-open time windows.

use crate::algebra::{self, Aggregate, Direction, SortKey};
use crate::error::{Error, Result};
use crate::relation::{BaseType, Record, Relation, Value};

/// One entry of a frequency ranking: a key value and how many rows carried
/// it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedEntry {
    pub key: Value,
    pub count: i64,
}

/// Counts rows per distinct value of `key` and orders the result by count
/// descending, breaking ties by key ascending. Among tied counts a Null key
/// group orders after every non-null key. Output schema is `{key, count}`
/// where `key` keeps the input column's type and `count` is a non-null
/// integer.
pub fn frequency_rank(rel: &Relation, key: &str) -> Result<Relation> {
    let grouped = algebra::group_aggregate(rel, &[key], &[Aggregate::count("count")])?;
    let by_count = algebra::sort(
        &grouped,
        &[
            SortKey {
                column: "count".to_string(),
                direction: Direction::Descending,
            },
            SortKey {
                column: key.to_string(),
                direction: Direction::Ascending,
            },
        ],
    )?;
    // Ascending key order puts a Null key group before non-null keys with
    // the same count; rotate each run of tied counts so Null lands last.
    let rows = by_count.rows();
    let mut reordered: Vec<Record> = Vec::with_capacity(rows.len());
    let mut i = 0;
    while i < rows.len() {
        let mut j = i + 1;
        while j < rows.len() && rows[j].values[1] == rows[i].values[1] {
            j += 1;
        }
        if rows[i].values[0].is_null() && j > i + 1 {
            reordered.extend(rows[i + 1..j].iter().cloned());
            reordered.push(rows[i].clone());
        } else {
            reordered.extend(rows[i..j].iter().cloned());
        }
        i = j;
    }
    Ok(Relation::from_validated(by_count.schema().clone(), reordered))
}

/// The first entry of [`frequency_rank`], or `None` for an empty input.
pub fn find_max(rel: &Relation, key: &str) -> Result<Option<RankedEntry>> {
    let ranked = frequency_rank(rel, key)?;
    Ok(ranked.rows().first().map(entry_of))
}

/// The least frequent entry: minimal count, ties broken by key ascending
/// with a Null key ordering after non-null keys, mirroring [`find_max`].
pub fn find_min(rel: &Relation, key: &str) -> Result<Option<RankedEntry>> {
    let ranked = frequency_rank(rel, key)?;
    let rows = ranked.rows();
    if rows.is_empty() {
        return Ok(None);
    }
    // The ranking is count-descending, so the minimal count is the run at
    // the tail; its first row already carries the right tie-break order.
    let min_count = &rows[rows.len() - 1].values[1];
    let first_of_tail = rows
        .iter()
        .position(|r| &r.values[1] == min_count)
        .expect("tail run exists");
    Ok(Some(entry_of(&rows[first_of_tail])))
}

fn entry_of(row: &Record) -> RankedEntry {
    let count = match row.values[1] {
        Value::Int(n) => n,
        _ => unreachable!("frequency_rank count column is Int"),
    };
    RankedEntry {
        key: row.values[0].clone(),
        count,
    }
}

/// The first `min(k, groups)` rows of [`frequency_rank`] over `key`. A
/// negative `k` is a value error.
pub fn top_k(rel: &Relation, key: &str, k: i64) -> Result<Relation> {
    if k < 0 {
        return Err(Error::Value(format!("top_k takes k >= 0, got {k}")));
    }
    let ranked = frequency_rank(rel, key)?;
    let take = (k as usize).min(ranked.len());
    Ok(Relation::from_validated(
        ranked.schema().clone(),
        ranked.rows()[..take].to_vec(),
    ))
}

/// Keeps rows whose `column` timestamp lies in the half-open interval
/// `[from, to)`. The column must be a timestamp; Null timestamps fall in no
/// window. An inverted interval (`from > to`) is a value error; an empty
/// interval (`from == to`) selects nothing.
pub fn time_window(
    rel: &Relation,
    column: &str,
    from: crate::relation::Timestamp,
    to: crate::relation::Timestamp,
) -> Result<Relation> {
    let index = rel.schema().require(column)?;
    let base = rel.schema().columns()[index].ty.base;
    if base != BaseType::Timestamp {
        return Err(Error::Type(format!(
            "time_window over non-timestamp column {column:?} ({base})"
        )));
    }
    if from > to {
        return Err(Error::Value(format!(
            "time_window interval is inverted: {from} > {to}"
        )));
    }
    let rows = rel
        .rows()
        .iter()
        .filter(|row| match &row.values[index] {
            Value::Timestamp(ts) => *ts >= from && *ts < to,
            _ => false,
        })
        .cloned()
        .collect();
    Ok(Relation::from_validated(rel.schema().clone(), rows))
}
