//! The bottom layer of the operator stack: relational-algebra operators over
//! typed relations. All operators are pure functions; they never mutate
//! their inputs.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::predicate::Predicate;
use crate::relation::{BaseType, Column, ColumnType, Record, Relation, Schema, Value};

/// Keeps exactly the rows where `predicate` evaluates true, in input order.
pub fn filter(rel: &Relation, predicate: &Predicate) -> Result<Relation> {
    let compiled = predicate.compile(rel.schema())?;
    let rows = rel
        .rows()
        .iter()
        .filter(|row| compiled.matches(row))
        .cloned()
        .collect();
    Ok(Relation::from_validated(rel.schema().clone(), rows))
}

/// Restricts and reorders the schema to `columns`. Bag cardinality is kept;
/// duplicate output rows are not collapsed.
pub fn project(rel: &Relation, columns: &[&str]) -> Result<Relation> {
    let mut indices = Vec::with_capacity(columns.len());
    for (i, name) in columns.iter().enumerate() {
        if columns[..i].contains(name) {
            return Err(Error::Schema(format!(
                "duplicate column {name:?} in projection"
            )));
        }
        indices.push(rel.schema().require(name)?);
    }
    let schema = Schema::new(
        indices
            .iter()
            .map(|&i| rel.schema().columns()[i].clone())
            .collect::<Vec<_>>(),
    )?;
    let rows = rel
        .rows()
        .iter()
        .map(|row| Record::new(indices.iter().map(|&i| row.values[i].clone()).collect()))
        .collect();
    Ok(Relation::from_validated(schema, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinKind {
    Inner,
    Cross,
}

/// Inner equality join or cartesian product.
///
/// Output schema is the left columns followed by the right columns, with
/// colliding right-side names suffixed `_r`. Join keys compare with relation
/// equality semantics except that Null matches nothing, not even Null.
/// Output rows are ordered by (left row index, right row index).
pub fn join(
    left: &Relation,
    right: &Relation,
    on: &[(&str, &str)],
    kind: JoinKind,
) -> Result<Relation> {
    let key_indices = match kind {
        JoinKind::Cross => {
            if !on.is_empty() {
                return Err(Error::Schema(
                    "cross join takes no key columns".to_string(),
                ));
            }
            Vec::new()
        }
        JoinKind::Inner => {
            let mut pairs = Vec::with_capacity(on.len());
            for (l, r) in on {
                let li = left.schema().require(l)?;
                let ri = right.schema().require(r)?;
                let lt = left.schema().columns()[li].ty.base;
                let rt = right.schema().columns()[ri].ty.base;
                if lt != rt {
                    return Err(Error::Schema(format!(
                        "join key type mismatch: {l:?} is {lt}, {r:?} is {rt}"
                    )));
                }
                pairs.push((li, ri));
            }
            pairs
        }
    };

    let mut columns: Vec<Column> = left.schema().columns().to_vec();
    for col in right.schema().columns() {
        let mut name = col.name.clone();
        while columns.iter().any(|c| c.name == name) {
            name.push_str("_r");
        }
        columns.push(Column { name, ty: col.ty });
    }
    let schema = Schema::new(columns)?;

    let mut rows = Vec::new();
    for lrow in left.rows() {
        for rrow in right.rows() {
            let matched = key_indices.iter().all(|&(li, ri)| {
                let lv = &lrow.values[li];
                let rv = &rrow.values[ri];
                !lv.is_null() && !rv.is_null() && lv == rv
            });
            if matched {
                let mut values = lrow.values.clone();
                values.extend(rrow.values.iter().cloned());
                rows.push(Record::new(values));
            }
        }
    }
    Ok(Relation::from_validated(schema, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortKey {
    pub column: String,
    pub direction: Direction,
}

impl SortKey {
    pub fn asc(column: impl Into<String>) -> Self {
        SortKey {
            column: column.into(),
            direction: Direction::Ascending,
        }
    }

    pub fn desc(column: impl Into<String>) -> Self {
        SortKey {
            column: column.into(),
            direction: Direction::Descending,
        }
    }
}

/// Stable multi-key sort. Rows equal under every key keep their input order.
/// Null orders before every non-null value under ascending (and therefore
/// after them under descending).
pub fn sort(rel: &Relation, keys: &[SortKey]) -> Result<Relation> {
    if keys.is_empty() {
        return Err(Error::Schema("sort requires at least one key".to_string()));
    }
    let resolved: Vec<(usize, Direction)> = keys
        .iter()
        .map(|k| Ok((rel.schema().require(&k.column)?, k.direction)))
        .collect::<Result<_>>()?;

    let mut rows = rel.rows().to_vec();
    rows.sort_by(|a, b| compare_rows(a, b, &resolved));
    Ok(Relation::from_validated(rel.schema().clone(), rows))
}

fn compare_rows(a: &Record, b: &Record, keys: &[(usize, Direction)]) -> Ordering {
    for &(index, direction) in keys {
        let ord = a.values[index].sort_cmp(&b.values[index]);
        let ord = match direction {
            Direction::Ascending => ord,
            Direction::Descending => ord.reverse(),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Bag cardinality.
pub fn count(rel: &Relation) -> i64 {
    rel.len() as i64
}

/// Bag union: rows of `a` followed by rows of `b`. Schemas must be identical
/// in names, order, and types.
pub fn union(a: &Relation, b: &Relation) -> Result<Relation> {
    let (sa, sb) = (a.schema(), b.schema());
    if sa != sb {
        let detail = sa
            .columns()
            .iter()
            .zip(sb.columns())
            .find(|(ca, cb)| ca != cb)
            .map(|(ca, cb)| {
                format!(
                    "first differing column: {} {} vs {} {}",
                    ca.name, ca.ty, cb.name, cb.ty
                )
            })
            .unwrap_or_else(|| format!("arity {} vs {}", sa.arity(), sb.arity()));
        return Err(Error::Schema(format!("union schema mismatch: {detail}")));
    }
    let mut rows = a.rows().to_vec();
    rows.extend(b.rows().iter().cloned());
    Ok(Relation::from_validated(sa.clone(), rows))
}

/// Keeps the first occurrence of each structurally equal row, in order of
/// first appearance.
pub fn distinct(rel: &Relation) -> Relation {
    let mut seen: HashMap<&Record, ()> = HashMap::with_capacity(rel.len());
    let mut rows = Vec::new();
    for row in rel.rows() {
        if seen.insert(row, ()).is_none() {
            rows.push(row.clone());
        }
    }
    Relation::from_validated(rel.schema().clone(), rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateKind {
    Count,
    Sum,
    Min,
    Max,
    Avg,
}

/// One aggregate column: what to compute, over which input column (absent
/// for count), and the output column name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub kind: AggregateKind,
    pub input: Option<String>,
    pub output: String,
}

impl Aggregate {
    pub fn count(output: impl Into<String>) -> Self {
        Aggregate {
            kind: AggregateKind::Count,
            input: None,
            output: output.into(),
        }
    }

    pub fn sum(input: impl Into<String>, output: impl Into<String>) -> Self {
        Aggregate {
            kind: AggregateKind::Sum,
            input: Some(input.into()),
            output: output.into(),
        }
    }

    pub fn min(input: impl Into<String>, output: impl Into<String>) -> Self {
        Aggregate {
            kind: AggregateKind::Min,
            input: Some(input.into()),
            output: output.into(),
        }
    }

    pub fn max(input: impl Into<String>, output: impl Into<String>) -> Self {
        Aggregate {
            kind: AggregateKind::Max,
            input: Some(input.into()),
            output: output.into(),
        }
    }

    pub fn avg(input: impl Into<String>, output: impl Into<String>) -> Self {
        Aggregate {
            kind: AggregateKind::Avg,
            input: Some(input.into()),
            output: output.into(),
        }
    }
}

enum Accumulator {
    Count(i64),
    SumInt(Option<i64>),
    SumFloat(Option<f64>),
    MinMax { best: Option<Value>, is_min: bool },
    Avg { total: f64, non_null: i64 },
}

impl Accumulator {
    fn feed(&mut self, value: &Value) -> Result<()> {
        match self {
            Accumulator::Count(n) => *n += 1,
            Accumulator::SumInt(acc) => {
                if let Value::Int(v) = value {
                    let base = acc.unwrap_or(0);
                    *acc = Some(base.checked_add(*v).ok_or_else(|| {
                        Error::Value("integer overflow in sum".to_string())
                    })?);
                }
            }
            Accumulator::SumFloat(acc) => {
                if let Value::Float(v) = value {
                    *acc = Some(acc.unwrap_or(0.0) + v);
                }
            }
            Accumulator::MinMax { best, is_min } => {
                if !value.is_null() {
                    let better = match best {
                        None => true,
                        Some(current) => {
                            let ord = value.sort_cmp(current);
                            if *is_min {
                                ord.is_lt()
                            } else {
                                ord.is_gt()
                            }
                        }
                    };
                    if better {
                        *best = Some(value.clone());
                    }
                }
            }
            Accumulator::Avg { total, non_null } => match value {
                Value::Int(v) => {
                    *total += *v as f64;
                    *non_null += 1;
                }
                Value::Float(v) => {
                    *total += v;
                    *non_null += 1;
                }
                _ => {}
            },
        }
        Ok(())
    }

    fn finish(self) -> Value {
        match self {
            Accumulator::Count(n) => Value::Int(n),
            Accumulator::SumInt(acc) => acc.map(Value::Int).unwrap_or(Value::Null),
            Accumulator::SumFloat(acc) => acc.map(Value::Float).unwrap_or(Value::Null),
            Accumulator::MinMax { best, .. } => best.unwrap_or(Value::Null),
            Accumulator::Avg { total, non_null } => {
                if non_null == 0 {
                    Value::Null
                } else {
                    Value::Float(total / non_null as f64)
                }
            }
        }
    }
}

/// Groups rows by the distinct tuple of `keys` and computes one column per
/// aggregate. Output rows appear in order of each key tuple's first
/// appearance.
///
/// `count` counts rows, Null cells included. `sum`/`min`/`max`/`avg` skip
/// Null inputs; a group with only Null inputs yields Null. `avg` is always a
/// float, even over integer input. An empty input yields an empty result:
/// there is no global row for grouped aggregation.
pub fn group_aggregate(rel: &Relation, keys: &[&str], aggs: &[Aggregate]) -> Result<Relation> {
    let key_indices: Vec<usize> = keys
        .iter()
        .map(|k| rel.schema().require(k))
        .collect::<Result<_>>()?;

    struct Plan {
        kind: AggregateKind,
        input: Option<usize>,
        column: Column,
    }

    let mut plans = Vec::with_capacity(aggs.len());
    for agg in aggs {
        let (input_index, out_ty) = match agg.kind {
            AggregateKind::Count => {
                if agg.input.is_some() {
                    return Err(Error::Schema(
                        "count takes no input column".to_string(),
                    ));
                }
                (None, ColumnType::required(BaseType::Int))
            }
            kind => {
                let name = agg.input.as_deref().ok_or_else(|| {
                    Error::Schema(format!("{kind:?} requires an input column"))
                })?;
                let index = rel.schema().require(name)?;
                let col = &rel.schema().columns()[index];
                let base = col.ty.base;
                match kind {
                    AggregateKind::Sum | AggregateKind::Avg => {
                        if !matches!(base, BaseType::Int | BaseType::Float) {
                            return Err(Error::Type(format!(
                                "{kind:?} over non-numeric column {name:?} ({base})"
                            )));
                        }
                    }
                    AggregateKind::Min | AggregateKind::Max => {
                        if base == BaseType::Bool {
                            return Err(Error::Type(format!(
                                "{kind:?} over unordered column {name:?} ({base})"
                            )));
                        }
                    }
                    AggregateKind::Count => unreachable!(),
                }
                let out_base = match kind {
                    AggregateKind::Avg => BaseType::Float,
                    _ => base,
                };
                let ty = ColumnType {
                    base: out_base,
                    nullable: col.ty.nullable,
                };
                (Some(index), ty)
            }
        };
        plans.push(Plan {
            kind: agg.kind,
            input: input_index,
            column: Column {
                name: agg.output.clone(),
                ty: out_ty,
            },
        });
    }

    let mut columns: Vec<Column> = key_indices
        .iter()
        .map(|&i| rel.schema().columns()[i].clone())
        .collect();
    columns.extend(plans.iter().map(|p| p.column.clone()));
    let schema = Schema::new(columns)?;

    let new_accumulators = || -> Vec<Accumulator> {
        plans
            .iter()
            .map(|p| match p.kind {
                AggregateKind::Count => Accumulator::Count(0),
                AggregateKind::Sum => {
                    let input = p.input.expect("sum has an input");
                    match rel.schema().columns()[input].ty.base {
                        BaseType::Int => Accumulator::SumInt(None),
                        _ => Accumulator::SumFloat(None),
                    }
                }
                AggregateKind::Min => Accumulator::MinMax {
                    best: None,
                    is_min: true,
                },
                AggregateKind::Max => Accumulator::MinMax {
                    best: None,
                    is_min: false,
                },
                AggregateKind::Avg => Accumulator::Avg {
                    total: 0.0,
                    non_null: 0,
                },
            })
            .collect()
    };

    let mut group_index: HashMap<Vec<Value>, usize> = HashMap::new();
    let mut groups: Vec<(Vec<Value>, Vec<Accumulator>)> = Vec::new();
    for row in rel.rows() {
        let key: Vec<Value> = key_indices
            .iter()
            .map(|&i| row.values[i].clone())
            .collect();
        let slot = match group_index.get(&key) {
            Some(&i) => i,
            None => {
                group_index.insert(key.clone(), groups.len());
                groups.push((key, new_accumulators()));
                groups.len() - 1
            }
        };
        for (plan, acc) in plans.iter().zip(groups[slot].1.iter_mut()) {
            match plan.input {
                Some(i) => acc.feed(&row.values[i])?,
                None => acc.feed(&Value::Null)?,
            }
        }
    }

    let rows = groups
        .into_iter()
        .map(|(mut key, accs)| {
            key.extend(accs.into_iter().map(Accumulator::finish));
            Record::new(key)
        })
        .collect();
    Ok(Relation::from_validated(schema, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::CmpOp;

    fn rel_of_ints(values: &[i64]) -> Relation {
        let schema = Schema::new(vec![("a", ColumnType::required(BaseType::Int))]).unwrap();
        Relation::new(
            schema,
            values
                .iter()
                .map(|&v| Record::new(vec![Value::Int(v)]))
                .collect(),
        )
        .unwrap()
    }

    fn authors(names: &[&str]) -> Relation {
        let schema = Schema::new(vec![("author", ColumnType::required(BaseType::Text))]).unwrap();
        Relation::new(
            schema,
            names
                .iter()
                .map(|n| Record::new(vec![Value::text(*n)]))
                .collect(),
        )
        .unwrap()
    }

    fn ints(rel: &Relation) -> Vec<i64> {
        rel.rows()
            .iter()
            .map(|r| match r.values[0] {
                Value::Int(v) => v,
                _ => panic!("expected int"),
            })
            .collect()
    }

    #[test]
    fn filter_keeps_matching_rows_in_order() {
        let rel = rel_of_ints(&[1, 2, 3]);
        let p = Predicate::cmp(
            CmpOp::Gt,
            Predicate::column("a"),
            Predicate::literal(Value::Int(1)),
        );
        assert_eq!(ints(&filter(&rel, &p).unwrap()), vec![2, 3]);
    }

    #[test]
    fn filter_true_literal_is_identity() {
        let rel = rel_of_ints(&[5, 5, 1]);
        let p = Predicate::literal(Value::Bool(true));
        assert_eq!(filter(&rel, &p).unwrap(), rel);
    }

    #[test]
    fn project_identity_and_reorder() {
        let schema = Schema::new(vec![
            ("a", ColumnType::required(BaseType::Int)),
            ("b", ColumnType::required(BaseType::Text)),
        ])
        .unwrap();
        let rel = Relation::new(
            schema,
            vec![
                Record::new(vec![Value::Int(1), Value::text("x")]),
                Record::new(vec![Value::Int(2), Value::text("y")]),
            ],
        )
        .unwrap();

        assert_eq!(project(&rel, &["a", "b"]).unwrap(), rel);

        let only_b = project(&rel, &["b"]).unwrap();
        assert_eq!(only_b.schema().arity(), 1);
        assert_eq!(only_b.rows()[0].values[0], Value::text("x"));
        assert_eq!(only_b.rows()[1].values[0], Value::text("y"));

        assert_eq!(
            project(&project(&rel, &["b"]).unwrap(), &["b"]).unwrap(),
            only_b
        );

        assert!(project(&rel, &["zz"]).is_err());
        assert!(project(&rel, &["a", "a"]).is_err());
    }

    #[test]
    fn cross_join_cardinality_and_collision_suffix() {
        let left = rel_of_ints(&[1, 2]);
        let right = rel_of_ints(&[10, 20, 30]);
        let out = join(&left, &right, &[], JoinKind::Cross).unwrap();
        assert_eq!(out.len(), 6);
        let names: Vec<&str> = out
            .schema()
            .columns()
            .iter()
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(names, vec!["a", "a_r"]);
        // Ordered by (left index, right index).
        assert_eq!(out.rows()[0].values, vec![Value::Int(1), Value::Int(10)]);
        assert_eq!(out.rows()[1].values, vec![Value::Int(1), Value::Int(20)]);
        assert_eq!(out.rows()[5].values, vec![Value::Int(2), Value::Int(30)]);
    }

    #[test]
    fn inner_join_no_matches_keeps_full_schema() {
        let left = rel_of_ints(&[1]);
        let right = rel_of_ints(&[2]);
        let out = join(&left, &right, &[("a", "a")], JoinKind::Inner).unwrap();
        assert_eq!(out.len(), 0);
        assert_eq!(out.schema().arity(), 2);
    }

    #[test]
    fn inner_join_null_matches_nothing() {
        let schema = Schema::new(vec![("k", ColumnType::nullable(BaseType::Int))]).unwrap();
        let rel = Relation::new(
            schema,
            vec![
                Record::new(vec![Value::Null]),
                Record::new(vec![Value::Int(1)]),
            ],
        )
        .unwrap();
        let out = join(&rel, &rel, &[("k", "k")], JoinKind::Inner).unwrap();
        // Only the 1-1 pair joins; Null-Null does not.
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn join_rejects_bad_keys() {
        let left = rel_of_ints(&[1]);
        let right = authors(&["x"]);
        assert!(join(&left, &right, &[("a", "author")], JoinKind::Inner).is_err());
        assert!(join(&left, &right, &[("a", "author")], JoinKind::Cross).is_err());
        assert!(join(&left, &right, &[("nope", "author")], JoinKind::Inner).is_err());
    }

    #[test]
    fn sort_is_stable() {
        let schema = Schema::new(vec![
            ("a", ColumnType::required(BaseType::Int)),
            ("tag", ColumnType::required(BaseType::Text)),
        ])
        .unwrap();
        let rel = Relation::new(
            schema,
            vec![
                Record::new(vec![Value::Int(2), Value::text("first")]),
                Record::new(vec![Value::Int(1), Value::text("mid")]),
                Record::new(vec![Value::Int(2), Value::text("second")]),
            ],
        )
        .unwrap();
        let sorted = sort(&rel, &[SortKey::asc("a")]).unwrap();
        assert_eq!(
            sorted.rows()[1].values[1],
            Value::text("first"),
            "ties keep input order"
        );
        assert_eq!(sorted.rows()[2].values[1], Value::text("second"));

        let already = sort(&sorted, &[SortKey::asc("a")]).unwrap();
        assert_eq!(already, sorted);
    }

    #[test]
    fn sort_null_first_ascending_last_descending() {
        let schema = Schema::new(vec![("a", ColumnType::nullable(BaseType::Int))]).unwrap();
        let rel = Relation::new(
            schema,
            vec![
                Record::new(vec![Value::Int(5)]),
                Record::new(vec![Value::Null]),
                Record::new(vec![Value::Int(1)]),
            ],
        )
        .unwrap();
        let asc = sort(&rel, &[SortKey::asc("a")]).unwrap();
        assert_eq!(asc.rows()[0].values[0], Value::Null);
        let desc = sort(&rel, &[SortKey::desc("a")]).unwrap();
        assert_eq!(desc.rows()[2].values[0], Value::Null);
    }

    #[test]
    fn count_is_bag_cardinality() {
        assert_eq!(count(&rel_of_ints(&[])), 0);
        assert_eq!(count(&rel_of_ints(&[7, 7, 7])), 3);
    }

    #[test]
    fn union_appends_and_checks_schema() {
        let a = rel_of_ints(&[1]);
        let b = rel_of_ints(&[1]);
        let out = union(&a, &b).unwrap();
        assert_eq!(out.len(), 2);

        let empty = rel_of_ints(&[]);
        assert_eq!(union(&a, &empty).unwrap(), a);

        let other = authors(&["x"]);
        let err = union(&a, &other).unwrap_err();
        assert!(err.to_string().contains("first differing column"), "{err}");
    }

    #[test]
    fn distinct_keeps_first_occurrence() {
        let rel = rel_of_ints(&[1, 2, 1]);
        assert_eq!(ints(&distinct(&rel)), vec![1, 2]);

        let unique = rel_of_ints(&[3, 1, 2]);
        assert_eq!(distinct(&unique), unique);
        assert_eq!(distinct(&distinct(&rel)), distinct(&rel));
    }

    #[test]
    fn group_count_by_first_appearance() {
        let rel = authors(&["A", "B", "A"]);
        let out = group_aggregate(&rel, &["author"], &[Aggregate::count("n")]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(
            out.rows()[0].values,
            vec![Value::text("A"), Value::Int(2)]
        );
        assert_eq!(
            out.rows()[1].values,
            vec![Value::text("B"), Value::Int(1)]
        );
    }

    #[test]
    fn group_aggregate_empty_input_yields_no_rows() {
        let rel = authors(&[]);
        let out = group_aggregate(&rel, &["author"], &[Aggregate::count("n")]).unwrap();
        assert!(out.is_empty());
        let global = group_aggregate(&rel, &[], &[Aggregate::count("n")]).unwrap();
        assert!(global.is_empty(), "no global row for grouped aggregation");
    }

    #[test]
    fn aggregates_skip_nulls_and_avg_is_float() {
        let schema = Schema::new(vec![
            ("g", ColumnType::required(BaseType::Text)),
            ("v", ColumnType::nullable(BaseType::Int)),
        ])
        .unwrap();
        let rel = Relation::new(
            schema,
            vec![
                Record::new(vec![Value::text("a"), Value::Int(1)]),
                Record::new(vec![Value::text("a"), Value::Null]),
                Record::new(vec![Value::text("a"), Value::Int(4)]),
                Record::new(vec![Value::text("b"), Value::Null]),
            ],
        )
        .unwrap();
        let out = group_aggregate(
            &rel,
            &["g"],
            &[
                Aggregate::count("n"),
                Aggregate::sum("v", "total"),
                Aggregate::min("v", "lo"),
                Aggregate::max("v", "hi"),
                Aggregate::avg("v", "mean"),
            ],
        )
        .unwrap();
        let a = &out.rows()[0].values;
        assert_eq!(a[1], Value::Int(3), "count includes the Null row");
        assert_eq!(a[2], Value::Int(5));
        assert_eq!(a[3], Value::Int(1));
        assert_eq!(a[4], Value::Int(4));
        assert_eq!(a[5], Value::Float(2.5));
        let b = &out.rows()[1].values;
        assert_eq!(b[1], Value::Int(1));
        assert_eq!(b[2], Value::Null, "all-Null group sums to Null");
        assert_eq!(b[5], Value::Null);
    }

    #[test]
    fn sum_over_text_is_a_type_error() {
        let rel = authors(&["x"]);
        let err = group_aggregate(&rel, &[], &[Aggregate::sum("author", "s")]).unwrap_err();
        assert!(matches!(err, Error::Type(_)), "{err}");
    }
}
