//! The typed in-memory relation model every operator consumes and produces.
//!
//! Relations are bags: duplicate rows are legal and row order is significant.
//! Construction validates every row against the schema, so downstream
//! operators can assume well-typed cells. Relations are immutable once built
//! and cheap to share across threads.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::{DateTime, SecondsFormat, Utc};

use crate::error::{Error, Result};

/// A UTC instant with microsecond precision.
///
/// Stored as microseconds since the Unix epoch. Sub-microsecond input is
/// truncated at construction, so equality is always microsecond-exact and
/// round-trips through text are lossless.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn from_micros(micros: i64) -> Self {
        Timestamp(micros)
    }

    pub fn micros(self) -> i64 {
        self.0
    }

    /// Parses an ISO-8601 / RFC 3339 timestamp with an explicit offset and
    /// normalizes it to UTC.
    pub fn parse(text: &str) -> Result<Self> {
        let parsed = DateTime::parse_from_rfc3339(text)
            .map_err(|e| Error::Value(format!("invalid timestamp {text:?}: {e}")))?;
        Ok(Timestamp(parsed.with_timezone(&Utc).timestamp_micros()))
    }

    fn to_datetime(self) -> DateTime<Utc> {
        DateTime::<Utc>::from_timestamp_micros(self.0)
            .expect("microsecond timestamp out of chrono range")
    }
}

impl fmt::Display for Timestamp {
    /// Canonical rendering: UTC with a `Z` suffix and a fixed six-digit
    /// fractional second, e.g. `2017-03-01T00:00:00.000000Z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            self.to_datetime()
                .to_rfc3339_opts(SecondsFormat::Micros, true)
        )
    }
}

/// A single cell value.
///
/// `Int` and `Float` never compare equal to each other; there is no implicit
/// numeric coercion anywhere in the engine.
#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Timestamp(Timestamp),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// The borrowed string for text values, `None` otherwise.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn base_type(&self) -> Option<BaseType> {
        match self {
            Value::Null => None,
            Value::Bool(_) => Some(BaseType::Bool),
            Value::Int(_) => Some(BaseType::Int),
            Value::Float(_) => Some(BaseType::Float),
            Value::Text(_) => Some(BaseType::Text),
            Value::Timestamp(_) => Some(BaseType::Timestamp),
        }
    }

    /// Total order used by sorting and tie-breaking: `Null` before every
    /// non-null value, then same-type natural order (text by code point,
    /// timestamps chronological). Values of different base types never meet
    /// in a well-typed column; they fall back to a fixed type rank so the
    /// order stays total.
    pub fn sort_cmp(&self, other: &Value) -> Ordering {
        use Value::*;
        match (self, other) {
            (Null, Null) => Ordering::Equal,
            (Null, _) => Ordering::Less,
            (_, Null) => Ordering::Greater,
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => float_cmp(*a, *b),
            (Text(a), Text(b)) => a.cmp(b),
            (Timestamp(a), Timestamp(b)) => a.cmp(b),
            _ => self.type_rank().cmp(&other.type_rank()),
        }
    }

    fn type_rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Float(_) => 3,
            Value::Text(_) => 4,
            Value::Timestamp(_) => 5,
        }
    }
}

fn float_cmp(a: f64, b: f64) -> Ordering {
    // NaN never survives relation construction; ordering it greatest keeps
    // the comparison total for values built outside a relation.
    a.partial_cmp(&b).unwrap_or_else(|| {
        if a.is_nan() && b.is_nan() {
            Ordering::Equal
        } else if a.is_nan() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    })
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        use Value::*;
        match (self, other) {
            (Null, Null) => true,
            (Bool(a), Bool(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Float(a), Float(b)) => float_cmp(*a, *b) == Ordering::Equal,
            (Text(a), Text(b)) => a == b,
            (Timestamp(a), Timestamp(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.type_rank().hash(state);
        match self {
            Value::Null => {}
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Float(f) => {
                // Canonicalize -0.0 and NaN so hashing agrees with equality.
                let canonical = if *f == 0.0 {
                    0.0f64
                } else if f.is_nan() {
                    f64::NAN
                } else {
                    *f
                };
                canonical.to_bits().hash(state);
            }
            Value::Text(s) => s.hash(state),
            Value::Timestamp(t) => t.hash(state),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseType {
    Bool,
    Int,
    Float,
    Text,
    Timestamp,
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BaseType::Bool => "bool",
            BaseType::Int => "int",
            BaseType::Float => "float",
            BaseType::Text => "text",
            BaseType::Timestamp => "timestamp",
        };
        f.write_str(name)
    }
}

/// Column type: a base type plus nullability. A non-nullable column never
/// holds `Null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnType {
    pub base: BaseType,
    pub nullable: bool,
}

impl ColumnType {
    pub fn required(base: BaseType) -> Self {
        ColumnType {
            base,
            nullable: false,
        }
    }

    pub fn nullable(base: BaseType) -> Self {
        ColumnType {
            base,
            nullable: true,
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nullable {
            write!(f, "{}?", self.base)
        } else {
            write!(f, "{}", self.base)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

impl<N: Into<String>> From<(N, ColumnType)> for Column {
    fn from((name, ty): (N, ColumnType)) -> Self {
        Column {
            name: name.into(),
            ty,
        }
    }
}

/// Ordered, uniquely named columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<Column>,
}

const ILLEGAL_NAME_CHARS: [char; 4] = ['|', ',', '(', ')'];

impl Schema {
    /// Builds a schema, rejecting duplicate, empty, or malformed column
    /// names. Names may not contain whitespace or `|`, `,`, `(`, `)`.
    pub fn new<C: Into<Column>>(columns: Vec<C>) -> Result<Self> {
        let columns: Vec<Column> = columns.into_iter().map(Into::into).collect();
        for (i, col) in columns.iter().enumerate() {
            if col.name.is_empty() {
                return Err(Error::Schema(format!("column {i} has an empty name")));
            }
            if col
                .name
                .chars()
                .any(|c| c.is_whitespace() || ILLEGAL_NAME_CHARS.contains(&c))
            {
                return Err(Error::Schema(format!(
                    "illegal character in column name {:?}",
                    col.name
                )));
            }
            if columns[..i].iter().any(|c| c.name == col.name) {
                return Err(Error::Schema(format!(
                    "duplicate column name {:?}",
                    col.name
                )));
            }
        }
        Ok(Schema { columns })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Index of `name`, or a schema error naming the column.
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::Schema(format!("unknown column {name:?}")))
    }
}

/// One row of cell values, in schema column order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Record {
    pub values: Vec<Value>,
}

impl Record {
    pub fn new(values: Vec<Value>) -> Self {
        Record { values }
    }
}

impl From<Vec<Value>> for Record {
    fn from(values: Vec<Value>) -> Self {
        Record::new(values)
    }
}

/// What `validate_record` found wrong, if anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordViolation {
    Arity { expected: usize, actual: usize },
    /// The cell's type does not match the column, or is Null in a
    /// non-nullable column.
    CellType { column: String, detail: String },
    /// A float cell holds NaN, which relations reject outright.
    NanFloat { column: String },
}

impl fmt::Display for RecordViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordViolation::Arity { expected, actual } => {
                write!(f, "arity {actual} does not match schema arity {expected}")
            }
            RecordViolation::CellType { column, detail } => {
                write!(f, "column {column:?}: {detail}")
            }
            RecordViolation::NanFloat { column } => {
                write!(f, "column {column:?}: NaN float")
            }
        }
    }
}

/// Checks a record against a schema and reports the first violation, if any.
/// Violations are ordinary return values, not errors.
pub fn validate_record(schema: &Schema, record: &Record) -> std::result::Result<(), RecordViolation> {
    if record.values.len() != schema.arity() {
        return Err(RecordViolation::Arity {
            expected: schema.arity(),
            actual: record.values.len(),
        });
    }
    for (col, value) in schema.columns().iter().zip(&record.values) {
        match value {
            Value::Null => {
                if !col.ty.nullable {
                    return Err(RecordViolation::CellType {
                        column: col.name.clone(),
                        detail: "Null in non-nullable column".to_string(),
                    });
                }
            }
            Value::Float(f) if f.is_nan() => {
                return Err(RecordViolation::NanFloat {
                    column: col.name.clone(),
                });
            }
            other => {
                let actual = other.base_type().expect("non-null value has a base type");
                if actual != col.ty.base {
                    return Err(RecordViolation::CellType {
                        column: col.name.clone(),
                        detail: format!("expected {}, got {}", col.ty.base, actual),
                    });
                }
            }
        }
    }
    Ok(())
}

/// An immutable bag of records under one schema. Row order is preserved and
/// duplicates are kept; `distinct` is the explicit deduplication operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    schema: Schema,
    rows: Vec<Record>,
}

impl Relation {
    /// Validates every row against the schema. Row order is preserved
    /// exactly. Type violations name the row index and column.
    pub fn new(schema: Schema, rows: Vec<Record>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            match validate_record(&schema, row) {
                Ok(()) => {}
                Err(RecordViolation::NanFloat { column }) => {
                    return Err(Error::Value(format!(
                        "row {i}, column {column:?}: NaN float"
                    )));
                }
                Err(violation) => {
                    return Err(Error::Type(format!("row {i}: {violation}")));
                }
            }
        }
        Ok(Relation { schema, rows })
    }

    pub fn empty(schema: Schema) -> Self {
        Relation {
            schema,
            rows: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Record] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Internal constructor for operators whose output rows are correct by
    /// construction. Debug builds still validate.
    pub(crate) fn from_validated(schema: Schema, rows: Vec<Record>) -> Self {
        debug_assert!(rows
            .iter()
            .all(|row| validate_record(&schema, row).is_ok()));
        Relation { schema, rows }
    }
}
