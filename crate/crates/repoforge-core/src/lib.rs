//! Embeddable repository-analytics engine: typed in-memory relations, a
//! small relational-algebra core, mining operators composed from it,
//! issue–commit linking, ingestion of commit logs and issue exports, and a
//! pipe-chain pipeline language with an interpreter.

pub mod algebra;
pub mod dsl;
pub mod error;
pub mod ingest;
pub mod linking;
pub mod mining;
pub mod predicate;
pub mod relation;

pub use error::{Error, Result};
pub use relation::{
    BaseType, Column, ColumnType, Record, Relation, Schema, Timestamp, Value,
};
