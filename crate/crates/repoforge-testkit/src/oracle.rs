//! Independent oracle implementations. Everything here recomputes results
//! from first principles — linear scans, nested loops, insertion sort,
//! hand-rolled tallies — without calling the engine's operators, so that
//! agreement between the two is meaningful evidence.

use std::cmp::Ordering;

use crate::fixture::{PlainCommit, PlainIssue};
use repoforge_core::relation::{Record, Value};

/// Counts items matching a predicate by linear scan.
pub fn scan_count<T>(items: &[T], keep: impl Fn(&T) -> bool) -> i64 {
    let mut n = 0;
    for item in items {
        if keep(item) {
            n += 1;
        }
    }
    n
}

/// Tallies string keys in first-appearance order without a hash map.
pub fn tally<'a>(keys: impl IntoIterator<Item = &'a str>) -> Vec<(String, i64)> {
    let mut counts: Vec<(String, i64)> = Vec::new();
    for key in keys {
        match counts.iter_mut().find(|(k, _)| k == key) {
            Some((_, n)) => *n += 1,
            None => counts.push((key.to_string(), 1)),
        }
    }
    counts
}

/// Orders a tally by count descending, key ascending, via insertion sort.
pub fn rank(mut counts: Vec<(String, i64)>) -> Vec<(String, i64)> {
    for i in 1..counts.len() {
        let mut j = i;
        while j > 0 {
            let earlier = &counts[j - 1];
            let later = &counts[j];
            let out_of_order = later.1 > earlier.1 || (later.1 == earlier.1 && later.0 < earlier.0);
            if !out_of_order {
                break;
            }
            counts.swap(j - 1, j);
            j -= 1;
        }
    }
    counts
}

/// The ranking winner: highest count, ties broken by smallest key.
pub fn most_frequent<'a>(keys: impl IntoIterator<Item = &'a str>) -> Option<(String, i64)> {
    let mut best: Option<(String, i64)> = None;
    for (key, n) in tally(keys) {
        let better = match &best {
            None => true,
            Some((bk, bn)) => n > *bn || (n == *bn && key < *bk),
        };
        if better {
            best = Some((key, n));
        }
    }
    best
}

/// Value comparison re-stated from the model's ordering rules: Null sorts
/// before every non-null value; same-type values use natural order. (Mixed
/// base types never occur in a well-typed column.)
pub fn value_cmp(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Null, Value::Null) => Ordering::Equal,
        (Value::Null, _) => Ordering::Less,
        (_, Value::Null) => Ordering::Greater,
        (Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Float(x), Value::Float(y)) => x.partial_cmp(y).expect("oracle floats are not NaN"),
        (Value::Text(x), Value::Text(y)) => x.cmp(y),
        (Value::Timestamp(x), Value::Timestamp(y)) => x.cmp(y),
        _ => panic!("oracle compared values of different base types"),
    }
}

/// Reference stable sort: O(n²) insertion sort over (column index,
/// descending?) keys, using [`value_cmp`].
pub fn insertion_sort(rows: &[Record], keys: &[(usize, bool)]) -> Vec<Record> {
    let cmp = |a: &Record, b: &Record| -> Ordering {
        for &(index, descending) in keys {
            let ord = value_cmp(&a.values[index], &b.values[index]);
            let ord = if descending { ord.reverse() } else { ord };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    };
    let mut sorted: Vec<Record> = Vec::with_capacity(rows.len());
    for row in rows {
        // Insert after every row that is <= the new row: stability.
        let position = sorted
            .iter()
            .position(|existing| cmp(existing, row) == Ordering::Greater)
            .unwrap_or(sorted.len());
        sorted.insert(position, row.clone());
    }
    sorted
}

/// Reference inner-join row count by nested loops; Null keys match nothing.
pub fn nested_loop_join_count(
    left: &[Record],
    right: &[Record],
    pairs: &[(usize, usize)],
) -> i64 {
    let mut n = 0;
    for l in left {
        for r in right {
            let all_match = pairs.iter().all(|&(li, ri)| {
                let (lv, rv) = (&l.values[li], &r.values[ri]);
                !lv.is_null() && !rv.is_null() && lv == rv
            });
            if all_match {
                n += 1;
            }
        }
    }
    n
}

/// Reference link extraction: regex scan over each commit message, keeping
/// keys that exist in the issue list, first mention only, sorted per commit.
pub fn link_scan(
    commits: &[PlainCommit],
    issues: &[PlainIssue],
    pattern: &str,
) -> Vec<(String, String)> {
    let regex = regex::Regex::new(pattern).expect("oracle pattern compiles");
    let mut links = Vec::new();
    for commit in commits {
        let mut keys: Vec<String> = Vec::new();
        for captures in regex.captures_iter(&commit.message) {
            let key = captures.get(1).expect("one capture group").as_str();
            let known = issues.iter().any(|issue| issue.key == key);
            if known && !keys.iter().any(|k| k == key) {
                keys.push(key.to_string());
            }
        }
        keys.sort();
        for key in keys {
            links.push((commit.hash.clone(), key));
        }
    }
    links
}

/// What the end-to-end oracle concludes about a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub total_commits: i64,
    pub developer: Option<String>,
    pub display_name: Option<String>,
    pub commit_count: i64,
    pub resolved_critical: i64,
}

fn resolved_status(status: &str) -> bool {
    status.eq_ignore_ascii_case("resolved") || status.eq_ignore_ascii_case("closed")
}

/// The whole case study as one brute-force program: plain loops over plain
/// structs, no relations, no operators.
pub fn case_study(
    commits: &[PlainCommit],
    issues: &[PlainIssue],
    pattern: &str,
    priority: &str,
) -> OracleReport {
    let total_commits = commits.len() as i64;
    let ids: Vec<String> = commits
        .iter()
        .map(|c| c.author_email.to_lowercase())
        .collect();
    let Some((developer, commit_count)) = most_frequent(ids.iter().map(String::as_str)) else {
        return OracleReport {
            total_commits,
            developer: None,
            display_name: None,
            commit_count: 0,
            resolved_critical: 0,
        };
    };

    let display_name = most_frequent(
        commits
            .iter()
            .zip(&ids)
            .filter(|(_, id)| **id == developer)
            .map(|(c, _)| c.author_name.as_str()),
    )
    .map(|(name, _)| name);

    // Keys reachable from the developer's commits.
    let regex = regex::Regex::new(pattern).expect("oracle pattern compiles");
    let mut linked: Vec<&str> = Vec::new();
    for (commit, id) in commits.iter().zip(&ids) {
        if *id != developer {
            continue;
        }
        for captures in regex.captures_iter(&commit.message) {
            let key = captures.get(1).expect("one capture group").as_str();
            let known = issues.iter().any(|issue| issue.key == key);
            if known && !linked.contains(&key) {
                linked.push(key);
            }
        }
    }

    let mut resolved_critical = 0;
    let mut counted: Vec<&str> = Vec::new();
    for issue in issues {
        let priority_ok = issue
            .priority
            .as_deref()
            .is_some_and(|p| p.to_lowercase() == priority.to_lowercase());
        if priority_ok
            && resolved_status(&issue.status)
            && linked.contains(&issue.key.as_str())
            && !counted.contains(&issue.key.as_str())
        {
            counted.push(&issue.key);
            resolved_critical += 1;
        }
    }

    OracleReport {
        total_commits,
        developer: Some(developer),
        display_name,
        commit_count,
        resolved_critical,
    }
}
