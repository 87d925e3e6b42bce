//! The pipeline language: `source | stage | stage ...` over the operator
//! catalog.
//!
//! ```text
//! commits("log.jsonl") | normalize_identity | find_max(developer_id)
//! ```
//!
//! [`tokenize`] splits text into positioned tokens, [`parse`] builds a
//! [`PipelineAst`] (checking stage names and argument shapes),
//! [`pretty_print`] renders the canonical text (a parse round-trip fixed
//! point), and [`evaluate`] folds the stages over the loaded source.

mod ast;
mod eval;
mod parser;
mod token;

pub use ast::{pretty_print, PipelineAst, Source, SourceFormat, Stage};
pub use eval::{evaluate, EvalOutput};
pub use parser::{parse, parse_tokens};
pub use token::{tokenize, OpSym, Token, TokenKind};
