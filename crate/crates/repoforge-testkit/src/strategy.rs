//! Proptest strategies for relations, predicates, and pipeline syntax
//! trees.
//!
//! Relation values come from small per-type pools so that filters hit,
//! groups collide, and sorts have ties. Pipeline trees are built only from
//! shapes the grammar can express (no negative numbers, no boolean or null
//! literals), so `parse(pretty_print(ast)) == ast` is a fair law.

use proptest::prelude::*;

use repoforge_core::algebra::SortKey;
use repoforge_core::dsl::{PipelineAst, Source, SourceFormat, Stage};
use repoforge_core::predicate::{CmpOp, Predicate};
use repoforge_core::relation::{
    BaseType, ColumnType, Record, Relation, Schema, Timestamp, Value,
};

const COLUMN_NAMES: [&str; 4] = ["alpha", "beta", "gamma", "delta"];
const INT_POOL: [i64; 7] = [-3, -1, 0, 1, 2, 3, 7];
const FLOAT_POOL: [f64; 7] = [-2.5, -1.0, 0.0, 0.5, 1.5, 2.5, 10.25];
const TEXT_POOL: [&str; 7] = ["", "a", "ab", "alpha", "b", "x y", "Z"];
const TS_POOL: [i64; 5] = [
    0,
    86_400_000_000,
    1_488_326_400_000_000,
    1_488_412_800_000_000,
    1_600_000_000_123_456,
];
const REGEX_POOL: [&str; 4] = ["a", "^a", "b$", "[xy]"];

/// Micros range safely inside chrono's renderable span (~1938..2100).
const TS_MIN: i64 = -1_000_000_000_000_000;
const TS_MAX: i64 = 4_102_444_800_000_000;

fn base_type(index: u8) -> BaseType {
    [
        BaseType::Bool,
        BaseType::Int,
        BaseType::Float,
        BaseType::Text,
        BaseType::Timestamp,
    ][index as usize % 5]
}

fn pool_value(base: BaseType, pick: usize) -> Value {
    match base {
        BaseType::Bool => Value::Bool(pick % 2 == 1),
        BaseType::Int => Value::Int(INT_POOL[pick % INT_POOL.len()]),
        BaseType::Float => Value::Float(FLOAT_POOL[pick % FLOAT_POOL.len()]),
        BaseType::Text => Value::text(TEXT_POOL[pick % TEXT_POOL.len()]),
        BaseType::Timestamp => {
            Value::Timestamp(Timestamp::from_micros(TS_POOL[pick % TS_POOL.len()]))
        }
    }
}

fn cell(base: BaseType, nullable: bool, seed: u16) -> Value {
    if nullable && seed % 4 == 0 {
        return Value::Null;
    }
    pool_value(base, (seed / 4) as usize)
}

type ColumnSpec = (u8, bool);

fn arb_columns() -> impl Strategy<Value = Vec<ColumnSpec>> {
    prop::collection::vec((0..5u8, any::<bool>()), 1..=4)
}

fn arb_rows(ncols: usize, max: usize) -> impl Strategy<Value = Vec<Vec<u16>>> {
    prop::collection::vec(prop::collection::vec(any::<u16>(), ncols), 0..=max)
}

fn relation_from(cols: &[ColumnSpec], rows: &[Vec<u16>]) -> Relation {
    let schema = Schema::new(
        cols.iter()
            .enumerate()
            .map(|(i, (ty, nullable))| {
                let base = base_type(*ty);
                let ty = if *nullable {
                    ColumnType::nullable(base)
                } else {
                    ColumnType::required(base)
                };
                (COLUMN_NAMES[i], ty)
            })
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let records = rows
        .iter()
        .map(|seeds| {
            Record::new(
                seeds
                    .iter()
                    .zip(cols)
                    .map(|(seed, (ty, nullable))| cell(base_type(*ty), *nullable, *seed))
                    .collect(),
            )
        })
        .collect();
    Relation::new(schema, records).unwrap()
}

/// A relation with 1–4 columns of any base type, nullable or not, and up
/// to 60 rows drawn from the pools.
pub fn arb_relation() -> impl Strategy<Value = Relation> {
    arb_columns()
        .prop_flat_map(|cols| {
            let rows = arb_rows(cols.len(), 60);
            (Just(cols), rows)
        })
        .prop_map(|(cols, rows)| relation_from(&cols, &rows))
}

/// Two relations over the same schema, for union-style laws.
pub fn arb_relation_pair() -> impl Strategy<Value = (Relation, Relation)> {
    arb_columns()
        .prop_flat_map(|cols| {
            let a = arb_rows(cols.len(), 40);
            let b = arb_rows(cols.len(), 40);
            (Just(cols), a, b)
        })
        .prop_map(|(cols, a, b)| (relation_from(&cols, &a), relation_from(&cols, &b)))
}

fn keyed_relation(
    text_keys: bool,
    max_rows: usize,
) -> impl Strategy<Value = Relation> {
    (1u16..=10)
        .prop_flat_map(move |distinct| {
            prop::collection::vec((0..distinct, any::<u16>()), 0..=max_rows)
        })
        .prop_map(move |rows| {
            let key_ty = if text_keys { BaseType::Text } else { BaseType::Int };
            let schema = Schema::new(vec![
                ("k", ColumnType::required(key_ty)),
                ("payload", ColumnType::nullable(BaseType::Int)),
            ])
            .unwrap();
            let records = rows
                .iter()
                .map(|(k, seed)| {
                    let key = if text_keys {
                        Value::text(format!("k{k}"))
                    } else {
                        Value::Int(i64::from(*k))
                    };
                    let payload = if seed % 4 == 0 {
                        Value::Null
                    } else {
                        Value::Int(i64::from(seed % 100))
                    };
                    Record::new(vec![key, payload])
                })
                .collect();
            Relation::new(schema, records).unwrap()
        })
}

/// A relation with a non-nullable key column named `k` (text or int, at
/// most 10 distinct values) and a nullable payload column; up to 100 rows.
pub fn arb_keyed_relation() -> impl Strategy<Value = Relation> {
    any::<bool>().prop_flat_map(|text_keys| keyed_relation(text_keys, 100))
}

/// Two relations sharing the `k` column's type, for join laws.
pub fn arb_keyed_pair() -> impl Strategy<Value = (Relation, Relation)> {
    any::<bool>()
        .prop_flat_map(|text_keys| (keyed_relation(text_keys, 30), keyed_relation(text_keys, 30)))
}

/// Like [`arb_keyed_relation`] but keys are always text, so string-keyed
/// reference tallies can be compared directly.
pub fn arb_text_keyed_relation() -> impl Strategy<Value = Relation> {
    keyed_relation(true, 100)
}

/// Blueprint for a predicate that is guaranteed to compile against any
/// schema once instantiated by [`typed_predicate`]. Indices are resolved
/// modulo whatever the schema offers.
#[derive(Debug, Clone)]
pub enum PredSeed {
    Atom { col: u16, op: u16, lit: u16 },
    NullCheck { col: u16 },
    Not(Box<PredSeed>),
    And(Box<PredSeed>, Box<PredSeed>),
    Or(Box<PredSeed>, Box<PredSeed>),
}

pub fn arb_pred_seed() -> impl Strategy<Value = PredSeed> {
    let leaf = prop_oneof![
        (any::<u16>(), any::<u16>(), any::<u16>())
            .prop_map(|(col, op, lit)| PredSeed::Atom { col, op, lit }),
        any::<u16>().prop_map(|col| PredSeed::NullCheck { col }),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| PredSeed::Not(Box::new(p))),
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| PredSeed::And(Box::new(l), Box::new(r))),
            (inner.clone(), inner)
                .prop_map(|(l, r)| PredSeed::Or(Box::new(l), Box::new(r))),
        ]
    })
}

/// Instantiates a seed against a schema, picking type-correct operators
/// and literals so the result always compiles.
pub fn typed_predicate(seed: &PredSeed, schema: &Schema) -> Predicate {
    match seed {
        PredSeed::Atom { col, op, lit } => {
            let column = &schema.columns()[*col as usize % schema.arity()];
            let base = column.ty.base;
            let ops: &[CmpOp] = match base {
                BaseType::Bool => &[CmpOp::Eq, CmpOp::Ne],
                BaseType::Text => &[
                    CmpOp::Eq,
                    CmpOp::Ne,
                    CmpOp::Lt,
                    CmpOp::Le,
                    CmpOp::Gt,
                    CmpOp::Ge,
                    CmpOp::Contains,
                    CmpOp::Matches,
                ],
                _ => &[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge],
            };
            let op = ops[*op as usize % ops.len()];
            let rhs = if op == CmpOp::Matches {
                Value::text(REGEX_POOL[*lit as usize % REGEX_POOL.len()])
            } else {
                pool_value(base, *lit as usize)
            };
            Predicate::cmp(op, Predicate::column(&column.name), Predicate::literal(rhs))
        }
        PredSeed::NullCheck { col } => {
            let column = &schema.columns()[*col as usize % schema.arity()];
            Predicate::is_null(Predicate::column(&column.name))
        }
        PredSeed::Not(inner) => Predicate::not(typed_predicate(inner, schema)),
        PredSeed::And(l, r) => {
            Predicate::and(typed_predicate(l, schema), typed_predicate(r, schema))
        }
        PredSeed::Or(l, r) => {
            Predicate::or(typed_predicate(l, schema), typed_predicate(r, schema))
        }
    }
}

/// A relation plus two predicates that compile against its schema.
pub fn arb_filter_case() -> impl Strategy<Value = (Relation, Predicate, Predicate)> {
    (arb_relation(), arb_pred_seed(), arb_pred_seed()).prop_map(|(rel, a, b)| {
        let p = typed_predicate(&a, rel.schema());
        let q = typed_predicate(&b, rel.schema());
        (rel, p, q)
    })
}

// ---- pipeline syntax trees ----

/// Identifiers as the grammar sees them; keywords are contextual, so words
/// like `asc` or `count` are legal column names and must round-trip too.
fn arb_ident() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z][a-z0-9_]{0,7}").unwrap()
}

/// String literal content, including the characters the escaping rules
/// exist for and raw newlines, which are legal inside strings.
fn arb_dsl_string() -> impl Strategy<Value = String> {
    let ch = prop_oneof![
        proptest::char::range('a', 'z'),
        Just('"'),
        Just('\\'),
        Just('\n'),
        Just('\u{1f}'),
        Just('é'),
        Just(' '),
        Just('.'),
        Just('/'),
        Just('#'),
    ];
    prop::collection::vec(ch, 0..12).prop_map(|cs| cs.into_iter().collect())
}

fn arb_dsl_int() -> impl Strategy<Value = i64> {
    prop_oneof![4 => 0i64..100, 1 => 0i64..=i64::MAX]
}

/// Finite, non-negative floats (the grammar has no unary minus, and `-0`
/// would not re-lex). Display output re-parses to the same bits.
fn arb_dsl_float() -> impl Strategy<Value = f64> {
    prop_oneof![
        (0u32..1000).prop_map(f64::from),
        0.0f64..1.0e9,
        Just(0.25),
        Just(123.456),
    ]
}

fn arb_dsl_timestamp() -> impl Strategy<Value = Timestamp> {
    (TS_MIN..TS_MAX).prop_map(Timestamp::from_micros)
}

fn arb_dsl_literal() -> impl Strategy<Value = Value> {
    prop_oneof![
        arb_dsl_int().prop_map(Value::Int),
        arb_dsl_float().prop_map(Value::Float),
        arb_dsl_string().prop_map(Value::Text),
        arb_dsl_timestamp().prop_map(Value::Timestamp),
    ]
}

fn arb_cmp_op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(vec![
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
        CmpOp::Contains,
        CmpOp::Matches,
    ])
}

/// Any predicate shape the grammar can produce, with no care for types:
/// round-tripping is purely syntactic. Comparison operands may themselves
/// be parenthesized expressions, as the grammar allows.
pub fn arb_dsl_predicate() -> impl Strategy<Value = Predicate> {
    let leaf = prop_oneof![
        arb_ident().prop_map(Predicate::Column),
        arb_dsl_literal().prop_map(Predicate::Literal),
    ];
    leaf.prop_recursive(3, 32, 2, |inner| {
        prop_oneof![
            (arb_cmp_op(), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Predicate::cmp(op, l, r)),
            inner.clone().prop_map(Predicate::is_null),
            inner.clone().prop_map(Predicate::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Predicate::and(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Predicate::or(l, r)),
        ]
    })
}

pub fn arb_source() -> impl Strategy<Value = Source> {
    let format = prop_oneof![
        Just(None),
        Just(Some(SourceFormat::Jsonl)),
        Just(Some(SourceFormat::GitRecords)),
    ];
    prop_oneof![
        (arb_dsl_string(), format)
            .prop_map(|(path, format)| Source::Commits { path, format }),
        arb_dsl_string().prop_map(|path| Source::Issues { path }),
    ]
}

fn arb_sort_keys() -> impl Strategy<Value = Vec<SortKey>> {
    prop::collection::vec((arb_ident(), any::<bool>()), 1..=3).prop_map(|keys| {
        keys.into_iter()
            .map(|(c, up)| if up { SortKey::asc(c) } else { SortKey::desc(c) })
            .collect()
    })
}

fn arb_opt_string() -> impl Strategy<Value = Option<String>> {
    prop_oneof![Just(None), arb_dsl_string().prop_map(Some)]
}

pub fn arb_stage() -> impl Strategy<Value = Stage> {
    let idents = || prop::collection::vec(arb_ident(), 1..=3);
    prop_oneof![
        arb_dsl_predicate().prop_map(Stage::Filter),
        idents().prop_map(Stage::Project),
        (arb_source(), arb_ident()).prop_map(|(source, on)| Stage::Join { source, on }),
        arb_sort_keys().prop_map(Stage::Sort),
        Just(Stage::Count),
        arb_source().prop_map(Stage::Union),
        Just(Stage::Distinct),
        idents().prop_map(Stage::GroupCount),
        arb_ident().prop_map(Stage::FrequencyRank),
        arb_ident().prop_map(Stage::FindMax),
        arb_ident().prop_map(Stage::FindMin),
        (arb_ident(), 0i64..1000).prop_map(|(key, k)| Stage::TopK { key, k }),
        (arb_ident(), arb_dsl_timestamp(), arb_dsl_timestamp())
            .prop_map(|(column, from, to)| Stage::TimeWindow { column, from, to }),
        Just(Stage::NormalizeIdentity),
        (arb_source(), arb_opt_string())
            .prop_map(|(source, pattern)| Stage::LinkIssues { source, pattern }),
        arb_opt_string().prop_map(|priority| Stage::ResolvedFilter { priority }),
        (arb_source(), arb_opt_string())
            .prop_map(|(source, priority)| Stage::CaseStudy { source, priority }),
    ]
}

/// A whole pipeline tree. Stage order is unconstrained: the grammar allows
/// stages after a terminal stage, and only evaluation rejects them.
pub fn arb_pipeline() -> impl Strategy<Value = PipelineAst> {
    (arb_source(), prop::collection::vec(arb_stage(), 0..=6))
        .prop_map(|(source, stages)| PipelineAst { source, stages })
}
