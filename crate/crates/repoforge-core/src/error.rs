//! Error type shared by every layer of the engine.

use thiserror::Error;

/// Unified error for relation construction, operators, ingestion, and the
/// pipeline DSL.
///
/// Lexing and parsing errors carry 1-based source positions; ingestion
/// errors carry the offending record number.
#[derive(Debug, Error)]
pub enum Error {
    /// Illegal schema: duplicate, empty, or malformed column names, unknown
    /// columns, or incompatible schemas.
    #[error("schema error: {0}")]
    Schema(String),

    /// A cell or operand does not match the type the schema requires.
    #[error("type error: {0}")]
    Type(String),

    /// A value is outside its legal domain (NaN float, negative k, inverted
    /// time window).
    #[error("value error: {0}")]
    Value(String),

    /// A predicate failed validation against the target schema.
    #[error("predicate error: {0}")]
    Predicate(String),

    /// An issue-key pattern failed to compile or has the wrong shape.
    #[error("pattern error: {0}")]
    Pattern(String),

    /// An input stream could not be decoded into commits or issues.
    #[error("parse error at record {record}: {message}")]
    Ingest { record: usize, message: String },

    /// Lexical error in pipeline source text.
    #[error("lex error at {line}:{column}: {message}")]
    Lex {
        line: u32,
        column: u32,
        message: String,
    },

    /// Syntax error in pipeline source text.
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: u32,
        column: u32,
        message: String,
    },

    /// A pipeline stage misuse detected at evaluation time.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// An error raised by a specific pipeline stage, tagged with its 1-based
    /// stage index.
    #[error("stage {index} ({name}): {source}")]
    Stage {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors produced while lexing or parsing pipeline text, as
    /// opposed to evaluating it. The CLI maps these to a distinct exit code.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Lex { .. } | Error::Parse { .. })
    }

    pub(crate) fn at_stage(self, index: usize, name: &str) -> Error {
        Error::Stage {
            index,
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
