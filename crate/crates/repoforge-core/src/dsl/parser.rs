//! Recursive-descent parser for pipeline text.
//!
//! Stage names, argument arity, and argument types are all checked here, so
//! an accepted tree always satisfies the catalog signatures. Errors carry
//! the position of the offending token.

use crate::algebra::{Direction, SortKey};
use crate::dsl::ast::{PipelineAst, Source, SourceFormat, Stage};
use crate::dsl::token::{tokenize, OpSym, Token, TokenKind};
use crate::error::{Error, Result};
use crate::predicate::{CmpOp, Predicate};
use crate::relation::Value;

/// Parses pipeline source text.
pub fn parse(text: &str) -> Result<PipelineAst> {
    parse_tokens(&tokenize(text)?)
}

/// Parses an already-tokenized pipeline. The token stream must end with
/// `Eof`, as produced by [`tokenize`].
pub fn parse_tokens(tokens: &[Token]) -> Result<PipelineAst> {
    let mut parser = Parser { tokens, pos: 0 };
    let ast = parser.pipeline()?;
    Ok(ast)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> &'a Token {
        let token = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        token
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> Error {
        Error::Parse {
            line: token.line,
            column: token.column,
            message: message.into(),
        }
    }

    fn expected(&self, what: &str) -> Error {
        let found = self.peek();
        self.error_at(found, format!("expected {what}, found {}", found.kind))
    }

    fn expect_punct(&mut self, c: char, what: &str) -> Result<()> {
        match &self.peek().kind {
            TokenKind::Punct(p) if *p == c => {
                self.bump();
                Ok(())
            }
            _ => Err(self.expected(what)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(&'a str, &'a Token)> {
        let token = self.peek();
        match &token.kind {
            TokenKind::Ident(name) => {
                self.bump();
                Ok((name, token))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<()> {
        let token = self.peek();
        match &token.kind {
            TokenKind::Ident(name) if name == keyword => {
                self.bump();
                Ok(())
            }
            _ => Err(self.expected(&format!("`{keyword}`"))),
        }
    }

    fn expect_string(&mut self, what: &str) -> Result<String> {
        match &self.peek().kind {
            TokenKind::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn pipeline(&mut self) -> Result<PipelineAst> {
        let source = self.source()?;
        let mut stages = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::Pipe => {
                    self.bump();
                    stages.push(self.stage()?);
                }
                TokenKind::Eof => break,
                _ => return Err(self.expected("`|` or end of input")),
            }
        }
        Ok(PipelineAst { source, stages })
    }

    fn source(&mut self) -> Result<Source> {
        let (name, token) = self.expect_ident("a `commits(...)` or `issues(...)` source")?;
        match name {
            "commits" => {
                self.expect_punct('(', "`(` after `commits`")?;
                let path = self.expect_string("a file path string")?;
                let format = if matches!(self.peek().kind, TokenKind::Punct(',')) {
                    self.bump();
                    let (word, token) = self.expect_ident("`jsonl` or `git_records`")?;
                    Some(match word {
                        "jsonl" => SourceFormat::Jsonl,
                        "git_records" => SourceFormat::GitRecords,
                        other => {
                            return Err(self.error_at(
                                token,
                                format!("unknown format `{other}`; expected `jsonl` or `git_records`"),
                            ))
                        }
                    })
                } else {
                    None
                };
                self.expect_punct(')', "`)` to close the source")?;
                Ok(Source::Commits { path, format })
            }
            "issues" => {
                self.expect_punct('(', "`(` after `issues`")?;
                let path = self.expect_string("a file path string")?;
                self.expect_punct(')', "`)` to close the source")?;
                Ok(Source::Issues { path })
            }
            other => Err(self.error_at(
                token,
                format!("unknown source `{other}`; expected `commits` or `issues`"),
            )),
        }
    }

    fn stage(&mut self) -> Result<Stage> {
        let (name, token) = self.expect_ident("a stage name after `|`")?;
        match name {
            "filter" => {
                self.expect_punct('(', "`(` after `filter`")?;
                let predicate = self.expr()?;
                self.expect_punct(')', "`)` to close `filter`")?;
                Ok(Stage::Filter(predicate))
            }
            "project" | "select" => {
                self.expect_punct('(', &format!("`(` after `{name}`"))?;
                let columns = self.ident_list()?;
                self.expect_punct(')', &format!("`)` to close `{name}`"))?;
                Ok(Stage::Project(columns))
            }
            "join" => {
                self.expect_punct('(', "`(` after `join`")?;
                let source = self.source()?;
                self.expect_punct(',', "`,` before the join key")?;
                self.expect_keyword("on")?;
                self.expect_punct(':', "`:` after `on`")?;
                let (on, _) = self.expect_ident("a join column name")?;
                self.expect_punct(')', "`)` to close `join`")?;
                Ok(Stage::Join {
                    source,
                    on: on.to_string(),
                })
            }
            "sort" => {
                self.expect_punct('(', "`(` after `sort`")?;
                let mut keys = vec![self.sort_key()?];
                while matches!(self.peek().kind, TokenKind::Punct(',')) {
                    self.bump();
                    keys.push(self.sort_key()?);
                }
                self.expect_punct(')', "`)` to close `sort`")?;
                Ok(Stage::Sort(keys))
            }
            "count" => self.no_args(name, Stage::Count),
            "union" => {
                self.expect_punct('(', "`(` after `union`")?;
                let source = self.source()?;
                self.expect_punct(')', "`)` to close `union`")?;
                Ok(Stage::Union(source))
            }
            "distinct" => self.no_args(name, Stage::Distinct),
            "group_count" => {
                self.expect_punct('(', "`(` after `group_count`")?;
                let keys = self.ident_list()?;
                self.expect_punct(')', "`)` to close `group_count`")?;
                Ok(Stage::GroupCount(keys))
            }
            "frequency_rank" | "find_max" | "find_min" => {
                self.expect_punct('(', &format!("`(` after `{name}`"))?;
                let (key, _) = self.expect_ident("a key column name")?;
                self.expect_punct(')', &format!("`)` to close `{name}`"))?;
                let key = key.to_string();
                Ok(match name {
                    "frequency_rank" => Stage::FrequencyRank(key),
                    "find_max" => Stage::FindMax(key),
                    _ => Stage::FindMin(key),
                })
            }
            "top_k" => {
                self.expect_punct('(', "`(` after `top_k`")?;
                let (key, _) = self.expect_ident("a key column name")?;
                self.expect_punct(',', "`,` before k")?;
                let k = match self.peek().kind {
                    TokenKind::Int(k) => {
                        self.bump();
                        k
                    }
                    _ => return Err(self.expected("an integer k")),
                };
                self.expect_punct(')', "`)` to close `top_k`")?;
                Ok(Stage::TopK {
                    key: key.to_string(),
                    k,
                })
            }
            "time_window" => {
                self.expect_punct('(', "`(` after `time_window`")?;
                let (column, _) = self.expect_ident("a timestamp column name")?;
                self.expect_punct(',', "`,` before the window start")?;
                let from = self.timestamp("a timestamp literal for the window start")?;
                self.expect_punct(',', "`,` before the window end")?;
                let to = self.timestamp("a timestamp literal for the window end")?;
                self.expect_punct(')', "`)` to close `time_window`")?;
                Ok(Stage::TimeWindow {
                    column: column.to_string(),
                    from,
                    to,
                })
            }
            "normalize_identity" => self.no_args(name, Stage::NormalizeIdentity),
            "link_issues" => {
                self.expect_punct('(', "`(` after `link_issues`")?;
                let source = self.source()?;
                let pattern = if matches!(self.peek().kind, TokenKind::Punct(',')) {
                    self.bump();
                    self.expect_keyword("pattern")?;
                    self.expect_punct(':', "`:` after `pattern`")?;
                    Some(self.expect_string("a pattern string")?)
                } else {
                    None
                };
                self.expect_punct(')', "`)` to close `link_issues`")?;
                Ok(Stage::LinkIssues { source, pattern })
            }
            "resolved_filter" => {
                if matches!(self.peek().kind, TokenKind::Punct('(')) {
                    self.bump();
                    let priority = self.expect_string("a priority string")?;
                    self.expect_punct(')', "`)` to close `resolved_filter`")?;
                    Ok(Stage::ResolvedFilter {
                        priority: Some(priority),
                    })
                } else {
                    Ok(Stage::ResolvedFilter { priority: None })
                }
            }
            "case_study" => {
                self.expect_punct('(', "`(` after `case_study`")?;
                let source = self.source()?;
                let priority = if matches!(self.peek().kind, TokenKind::Punct(',')) {
                    self.bump();
                    self.expect_keyword("priority")?;
                    self.expect_punct(':', "`:` after `priority`")?;
                    Some(self.expect_string("a priority string")?)
                } else {
                    None
                };
                self.expect_punct(')', "`)` to close `case_study`")?;
                Ok(Stage::CaseStudy { source, priority })
            }
            other => Err(self.error_at(token, format!("unknown stage `{other}`"))),
        }
    }

    fn no_args(&mut self, name: &str, stage: Stage) -> Result<Stage> {
        if matches!(self.peek().kind, TokenKind::Punct('(')) {
            return Err(self.expected(&format!(
                "no arguments (`{name}` takes none); `|` or end of input"
            )));
        }
        Ok(stage)
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        let (first, _) = self.expect_ident("a column name")?;
        let mut names = vec![first.to_string()];
        while matches!(self.peek().kind, TokenKind::Punct(',')) {
            self.bump();
            let (next, _) = self.expect_ident("a column name")?;
            names.push(next.to_string());
        }
        Ok(names)
    }

    fn sort_key(&mut self) -> Result<SortKey> {
        let (column, _) = self.expect_ident("a sort column name")?;
        let (word, token) = self.expect_ident("`asc` or `desc`")?;
        let direction = match word {
            "asc" => Direction::Ascending,
            "desc" => Direction::Descending,
            other => {
                return Err(
                    self.error_at(token, format!("expected `asc` or `desc`, found `{other}`"))
                )
            }
        };
        Ok(SortKey {
            column: column.to_string(),
            direction,
        })
    }

    fn timestamp(&mut self, what: &str) -> Result<crate::relation::Timestamp> {
        match self.peek().kind {
            TokenKind::Timestamp(ts) => {
                self.bump();
                Ok(ts)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn expr(&mut self) -> Result<Predicate> {
        let mut lhs = self.and_expr()?;
        while matches!(self.peek().kind, TokenKind::Op(OpSym::Or)) {
            self.bump();
            let rhs = self.and_expr()?;
            lhs = Predicate::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Predicate> {
        let mut lhs = self.not_expr()?;
        while matches!(self.peek().kind, TokenKind::Op(OpSym::And)) {
            self.bump();
            let rhs = self.not_expr()?;
            lhs = Predicate::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Predicate> {
        if matches!(self.peek().kind, TokenKind::Op(OpSym::Not)) {
            self.bump();
            let inner = self.cmp()?;
            return Ok(Predicate::not(inner));
        }
        self.cmp()
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        match &self.peek().kind {
            TokenKind::Op(OpSym::Eq) => Some(CmpOp::Eq),
            TokenKind::Op(OpSym::Ne) => Some(CmpOp::Ne),
            TokenKind::Op(OpSym::Lt) => Some(CmpOp::Lt),
            TokenKind::Op(OpSym::Le) => Some(CmpOp::Le),
            TokenKind::Op(OpSym::Gt) => Some(CmpOp::Gt),
            TokenKind::Op(OpSym::Ge) => Some(CmpOp::Ge),
            TokenKind::Ident(word) if word == "contains" => Some(CmpOp::Contains),
            TokenKind::Ident(word) if word == "matches" => Some(CmpOp::Matches),
            _ => None,
        }
    }

    fn at_cmp_tail(&self) -> bool {
        self.cmp_op().is_some()
            || matches!(&self.peek().kind, TokenKind::Ident(word) if word == "is")
    }

    fn cmp(&mut self) -> Result<Predicate> {
        let lhs = self.term()?;
        let parsed = if let Some(op) = self.cmp_op() {
            self.bump();
            let rhs = self.term()?;
            Predicate::cmp(op, lhs, rhs)
        } else if matches!(&self.peek().kind, TokenKind::Ident(word) if word == "is") {
            self.bump();
            self.expect_keyword("null")?;
            Predicate::is_null(lhs)
        } else {
            lhs
        };
        if self.at_cmp_tail() {
            return Err(self.expected(
                "`&&`, `||`, or `)` (comparisons are non-associative; parenthesize to chain)",
            ));
        }
        Ok(parsed)
    }

    fn term(&mut self) -> Result<Predicate> {
        let token = self.peek();
        match &token.kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.bump();
                Ok(Predicate::column(name))
            }
            TokenKind::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(Predicate::literal(Value::Text(s)))
            }
            TokenKind::Int(v) => {
                let v = *v;
                self.bump();
                Ok(Predicate::literal(Value::Int(v)))
            }
            TokenKind::Float(v) => {
                let v = *v;
                self.bump();
                Ok(Predicate::literal(Value::Float(v)))
            }
            TokenKind::Timestamp(ts) => {
                let ts = *ts;
                self.bump();
                Ok(Predicate::literal(Value::Timestamp(ts)))
            }
            TokenKind::Punct('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(')', "`)` to close the parenthesized expression")?;
                Ok(inner)
            }
            _ => Err(self.expected("a column, literal, or parenthesized expression")),
        }
    }
}
