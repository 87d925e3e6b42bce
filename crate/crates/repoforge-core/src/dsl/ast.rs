//! Pipeline syntax tree and its canonical renderer.
//!
//! `pretty_print` emits the canonical form of a pipeline: minimal
//! parentheses, `project` for the `select` alias, one space around pipes.
//! Re-parsing the output reproduces the tree exactly; that law is
//! property-tested.

use std::fmt::Write;

use crate::algebra::{Direction, SortKey};
use crate::predicate::Predicate;
use crate::relation::{Timestamp, Value};

/// File format accepted by the `commits(...)` source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Jsonl,
    GitRecords,
}

impl SourceFormat {
    pub fn keyword(self) -> &'static str {
        match self {
            SourceFormat::Jsonl => "jsonl",
            SourceFormat::GitRecords => "git_records",
        }
    }
}

/// Where a pipeline (or an inline stage argument) reads its relation from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Commits {
        path: String,
        /// `None` means the format keyword was omitted; jsonl is assumed.
        format: Option<SourceFormat>,
    },
    Issues {
        path: String,
    },
}

/// One stage of a pipeline. Each variant maps to exactly one library
/// operation.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Filter(Predicate),
    Project(Vec<String>),
    Join { source: Source, on: String },
    Sort(Vec<SortKey>),
    Count,
    Union(Source),
    Distinct,
    GroupCount(Vec<String>),
    FrequencyRank(String),
    FindMax(String),
    FindMin(String),
    TopK { key: String, k: i64 },
    TimeWindow {
        column: String,
        from: Timestamp,
        to: Timestamp,
    },
    NormalizeIdentity,
    LinkIssues {
        source: Source,
        pattern: Option<String>,
    },
    ResolvedFilter { priority: Option<String> },
    CaseStudy {
        source: Source,
        priority: Option<String>,
    },
}

impl Stage {
    /// The catalog name used in pipeline text and stage-error tags.
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Filter(_) => "filter",
            Stage::Project(_) => "project",
            Stage::Join { .. } => "join",
            Stage::Sort(_) => "sort",
            Stage::Count => "count",
            Stage::Union(_) => "union",
            Stage::Distinct => "distinct",
            Stage::GroupCount(_) => "group_count",
            Stage::FrequencyRank(_) => "frequency_rank",
            Stage::FindMax(_) => "find_max",
            Stage::FindMin(_) => "find_min",
            Stage::TopK { .. } => "top_k",
            Stage::TimeWindow { .. } => "time_window",
            Stage::NormalizeIdentity => "normalize_identity",
            Stage::LinkIssues { .. } => "link_issues",
            Stage::ResolvedFilter { .. } => "resolved_filter",
            Stage::CaseStudy { .. } => "case_study",
        }
    }

    /// True for stages whose output is a scalar or report rather than a
    /// relation; such stages are terminal.
    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            Stage::Count | Stage::FindMax(_) | Stage::FindMin(_) | Stage::CaseStudy { .. }
        )
    }
}

/// A parsed pipeline: one source, then zero or more stages.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineAst {
    pub source: Source,
    pub stages: Vec<Stage>,
}

/// Renders the canonical text of a pipeline; `parse(pretty_print(ast))`
/// reproduces `ast`.
pub fn pretty_print(ast: &PipelineAst) -> String {
    let mut out = String::new();
    write_source(&mut out, &ast.source);
    for stage in &ast.stages {
        out.push_str(" | ");
        write_stage(&mut out, stage);
    }
    out
}

fn write_source(out: &mut String, source: &Source) {
    match source {
        Source::Commits { path, format } => {
            out.push_str("commits(");
            write_string(out, path);
            if let Some(format) = format {
                out.push_str(", ");
                out.push_str(format.keyword());
            }
            out.push(')');
        }
        Source::Issues { path } => {
            out.push_str("issues(");
            write_string(out, path);
            out.push(')');
        }
    }
}

fn write_stage(out: &mut String, stage: &Stage) {
    match stage {
        Stage::Filter(predicate) => {
            out.push_str("filter(");
            write_expr(out, predicate, 0);
            out.push(')');
        }
        Stage::Project(columns) => {
            out.push_str("project(");
            out.push_str(&columns.join(", "));
            out.push(')');
        }
        Stage::Join { source, on } => {
            out.push_str("join(");
            write_source(out, source);
            out.push_str(", on: ");
            out.push_str(on);
            out.push(')');
        }
        Stage::Sort(keys) => {
            out.push_str("sort(");
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&key.column);
                out.push_str(match key.direction {
                    Direction::Ascending => " asc",
                    Direction::Descending => " desc",
                });
            }
            out.push(')');
        }
        Stage::Count => out.push_str("count"),
        Stage::Union(source) => {
            out.push_str("union(");
            write_source(out, source);
            out.push(')');
        }
        Stage::Distinct => out.push_str("distinct"),
        Stage::GroupCount(keys) => {
            out.push_str("group_count(");
            out.push_str(&keys.join(", "));
            out.push(')');
        }
        Stage::FrequencyRank(key) => {
            let _ = write!(out, "frequency_rank({key})");
        }
        Stage::FindMax(key) => {
            let _ = write!(out, "find_max({key})");
        }
        Stage::FindMin(key) => {
            let _ = write!(out, "find_min({key})");
        }
        Stage::TopK { key, k } => {
            let _ = write!(out, "top_k({key}, {k})");
        }
        Stage::TimeWindow { column, from, to } => {
            let _ = write!(out, "time_window({column}, @\"{from}\", @\"{to}\")");
        }
        Stage::NormalizeIdentity => out.push_str("normalize_identity"),
        Stage::LinkIssues { source, pattern } => {
            out.push_str("link_issues(");
            write_source(out, source);
            if let Some(pattern) = pattern {
                out.push_str(", pattern: ");
                write_string(out, pattern);
            }
            out.push(')');
        }
        Stage::ResolvedFilter { priority } => match priority {
            Some(priority) => {
                out.push_str("resolved_filter(");
                write_string(out, priority);
                out.push(')');
            }
            None => out.push_str("resolved_filter"),
        },
        Stage::CaseStudy { source, priority } => {
            out.push_str("case_study(");
            write_source(out, source);
            if let Some(priority) = priority {
                out.push_str(", priority: ");
                write_string(out, priority);
            }
            out.push(')');
        }
    }
}

fn write_string(out: &mut String, text: &str) {
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
}

// Precedence levels of the expression grammar, loosest first. `!` binds a
// whole comparison (`!a == b` negates the comparison), so CMP sits between
// NOT and TERM; `cmp` operands must be terms.
const OR: u8 = 0;
const AND: u8 = 1;
const NOT: u8 = 2;
const CMP: u8 = 3;
const TERM: u8 = 4;

fn write_expr(out: &mut String, expr: &Predicate, min_level: u8) {
    match expr {
        Predicate::Or(lhs, rhs) => {
            parenthesize(out, min_level > OR, |out| {
                // The grammar folds `||` leftward, so a left operand may be
                // another `||` without parentheses, but a right one may not.
                write_expr(out, lhs, OR);
                out.push_str(" || ");
                write_expr(out, rhs, AND);
            });
        }
        Predicate::And(lhs, rhs) => {
            parenthesize(out, min_level > AND, |out| {
                write_expr(out, lhs, AND);
                out.push_str(" && ");
                write_expr(out, rhs, NOT);
            });
        }
        Predicate::Not(inner) => {
            parenthesize(out, min_level > NOT, |out| {
                out.push('!');
                write_expr(out, inner, CMP);
            });
        }
        Predicate::Compare { op, lhs, rhs } => {
            parenthesize(out, min_level > CMP, |out| {
                write_expr(out, lhs, TERM);
                let _ = write!(out, " {} ", op.symbol());
                write_expr(out, rhs, TERM);
            });
        }
        Predicate::IsNull(inner) => {
            parenthesize(out, min_level > CMP, |out| {
                write_expr(out, inner, TERM);
                out.push_str(" is null");
            });
        }
        Predicate::Column(name) => out.push_str(name),
        Predicate::Literal(value) => write_literal(out, value),
    }
}

fn parenthesize(out: &mut String, needed: bool, body: impl FnOnce(&mut String)) {
    if needed {
        out.push('(');
        body(out);
        out.push(')');
    } else {
        body(out);
    }
}

fn write_literal(out: &mut String, value: &Value) {
    match value {
        Value::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Value::Float(v) => {
            let text = format!("{v}");
            out.push_str(&text);
            // A float literal must not lex as an integer.
            if !text.contains('.') && !text.contains(['e', 'E']) {
                out.push_str(".0");
            }
        }
        Value::Text(s) => write_string(out, s),
        Value::Timestamp(ts) => {
            let _ = write!(out, "@\"{ts}\"");
        }
        // The grammar has no boolean or null literals; parsed trees never
        // contain them.
        Value::Bool(v) => {
            let _ = write!(out, "{v}");
        }
        Value::Null => out.push_str("null"),
    }
}
