//! Property suite for the operator algebra. Each law is checked against
//! randomly generated relations; reference results come from brute-force
//! re-implementations (linear scans, insertion sort, nested loops) that
//! share no code with the operators under test.

use proptest::prelude::*;

use repoforge_core::algebra::{
    count, distinct, filter, group_aggregate, join, project, sort, union, Aggregate, JoinKind,
    SortKey,
};
use repoforge_core::mining::{find_max, frequency_rank};
use repoforge_core::predicate::Predicate;
use repoforge_core::{Relation, Value};
use repoforge_testkit::oracle;
use repoforge_testkit::strategy::{
    arb_filter_case, arb_keyed_pair, arb_keyed_relation, arb_relation, arb_relation_pair,
    arb_text_keyed_relation,
};

fn rel_and_column_subset() -> impl Strategy<Value = (Relation, Vec<String>)> {
    arb_relation().prop_flat_map(|rel| {
        let names: Vec<String> = rel
            .schema()
            .columns()
            .iter()
            .map(|c| c.name.clone())
            .collect();
        let max = names.len();
        (Just(rel), proptest::sample::subsequence(names, 1..=max))
    })
}

fn rel_and_sort_keys() -> impl Strategy<Value = (Relation, Vec<(usize, bool)>)> {
    arb_relation().prop_flat_map(|rel| {
        let arity = rel.schema().arity();
        let keys = proptest::collection::vec((0..arity, any::<bool>()), 1..=3);
        (Just(rel), keys)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// filter(rel, p && q) == filter(filter(rel, p), q)
    #[test]
    fn filter_conjunction_decomposes((rel, p, q) in arb_filter_case()) {
        let joint = filter(&rel, &Predicate::and(p.clone(), q.clone())).unwrap();
        let sequential = filter(&filter(&rel, &p).unwrap(), &q).unwrap();
        prop_assert_eq!(joint, sequential);
    }

    /// Projecting twice onto the same columns changes nothing.
    #[test]
    fn project_is_idempotent((rel, columns) in rel_and_column_subset()) {
        let names: Vec<&str> = columns.iter().map(String::as_str).collect();
        let once = project(&rel, &names).unwrap();
        let twice = project(&once, &names).unwrap();
        prop_assert_eq!(once, twice);
    }

    /// sort equals a reference stable insertion sort, which makes it both a
    /// permutation of its input and stable across equal keys.
    #[test]
    fn sort_is_stable_and_permutes((rel, keys) in rel_and_sort_keys()) {
        let sort_keys: Vec<SortKey> = keys
            .iter()
            .map(|&(index, descending)| {
                let name = &rel.schema().columns()[index].name;
                if descending { SortKey::desc(name.clone()) } else { SortKey::asc(name.clone()) }
            })
            .collect();
        let sorted = sort(&rel, &sort_keys).unwrap();
        let expected = oracle::insertion_sort(rel.rows(), &keys);
        prop_assert_eq!(sorted.rows(), expected.as_slice());

        // Permutation double-check that does not depend on the oracle.
        let mut before: Vec<String> = rel.rows().iter().map(|r| format!("{r:?}")).collect();
        let mut after: Vec<String> = sorted.rows().iter().map(|r| format!("{r:?}")).collect();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    /// |A × B| = |A| · |B|, and arities add.
    #[test]
    fn cross_join_cardinality((a, b) in (arb_relation(), arb_relation())) {
        let product = join(&a, &b, &[], JoinKind::Cross).unwrap();
        prop_assert_eq!(product.len(), a.len() * b.len());
        prop_assert_eq!(
            product.schema().arity(),
            a.schema().arity() + b.schema().arity()
        );
    }

    /// Inner-join row count equals the nested-loop reference; Null keys
    /// match nothing.
    #[test]
    fn inner_join_count_matches_nested_loops((a, b) in arb_keyed_pair()) {
        let joined = join(&a, &b, &[("k", "k")], JoinKind::Inner).unwrap();
        let expected = oracle::nested_loop_join_count(a.rows(), b.rows(), &[(0, 0)]);
        prop_assert_eq!(count(&joined), expected);
    }

    /// Bag union adds row counts; nothing collapses.
    #[test]
    fn union_count_is_additive((a, b) in arb_relation_pair()) {
        let both = union(&a, &b).unwrap();
        prop_assert_eq!(both.len(), a.len() + b.len());
    }

    /// distinct(distinct(rel)) == distinct(rel)
    #[test]
    fn distinct_is_idempotent(rel in arb_relation()) {
        let once = distinct(&rel);
        let twice = distinct(&once);
        prop_assert_eq!(once, twice);
    }

    /// find_max is structurally the head of the ranking, and the ranking is
    /// itself the sort-of-group-counts composition.
    #[test]
    fn find_max_is_the_ranking_head(rel in arb_keyed_relation()) {
        let ranked = frequency_rank(&rel, "k").unwrap();
        let composed = sort(
            &group_aggregate(&rel, &["k"], &[Aggregate::count("count")]).unwrap(),
            &[SortKey::desc("count"), SortKey::asc("k")],
        )
        .unwrap();
        prop_assert_eq!(&ranked, &composed, "ranking must equal its composition");

        let winner = find_max(&rel, "k").unwrap();
        match ranked.rows().first() {
            None => prop_assert!(winner.is_none()),
            Some(row) => {
                let entry = winner.expect("non-empty ranking has a head");
                prop_assert_eq!(&entry.key, &row.values[0]);
                prop_assert_eq!(Value::Int(entry.count), row.values[1].clone());
            }
        }
    }

    /// Group counts agree with a first-appearance linear tally.
    #[test]
    fn group_count_matches_tally(rel in arb_text_keyed_relation()) {
        let grouped = group_aggregate(&rel, &["k"], &[Aggregate::count("count")]).unwrap();
        let keys: Vec<&str> = rel
            .rows()
            .iter()
            .map(|r| r.values[0].as_text().expect("text key"))
            .collect();
        let expected = oracle::tally(keys.iter().copied());
        let actual: Vec<(String, i64)> = grouped
            .rows()
            .iter()
            .map(|r| {
                let key = r.values[0].as_text().expect("text key").to_string();
                let Value::Int(n) = r.values[1] else { panic!("count is an int") };
                (key, n)
            })
            .collect();
        prop_assert_eq!(actual, expected);
    }

    /// The full ranking agrees with the insertion-sort reference ranking.
    #[test]
    fn frequency_rank_matches_reference(rel in arb_text_keyed_relation()) {
        let ranked = frequency_rank(&rel, "k").unwrap();
        let keys: Vec<&str> = rel
            .rows()
            .iter()
            .map(|r| r.values[0].as_text().expect("text key"))
            .collect();
        let expected = oracle::rank(oracle::tally(keys.iter().copied()));
        let actual: Vec<(String, i64)> = ranked
            .rows()
            .iter()
            .map(|r| {
                let key = r.values[0].as_text().expect("text key").to_string();
                let Value::Int(n) = r.values[1] else { panic!("count is an int") };
                (key, n)
            })
            .collect();
        prop_assert_eq!(actual, expected);
    }
}
