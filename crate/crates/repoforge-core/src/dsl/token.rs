//! Lexer for pipeline source text.

use std::fmt;

use crate::error::{Error, Result};
use crate::relation::Timestamp;

/// Comparison and boolean operator symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpSym {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
}

impl OpSym {
    pub fn text(self) -> &'static str {
        match self {
            OpSym::Eq => "==",
            OpSym::Ne => "!=",
            OpSym::Lt => "<",
            OpSym::Le => "<=",
            OpSym::Gt => ">",
            OpSym::Ge => ">=",
            OpSym::And => "&&",
            OpSym::Or => "||",
            OpSym::Not => "!",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    /// `@"..."` literal, validated while lexing.
    Timestamp(Timestamp),
    /// One of `( ) , :`.
    Punct(char),
    Op(OpSym),
    Pipe,
    /// Synthetic end-of-input marker positioned one column past the final
    /// lexeme; simplifies "expected X, found end of input" reporting.
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(name) => write!(f, "identifier {name:?}"),
            TokenKind::Int(v) => write!(f, "integer {v}"),
            TokenKind::Float(v) => write!(f, "float {v}"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Timestamp(ts) => write!(f, "timestamp @\"{ts}\""),
            TokenKind::Punct(c) => write!(f, "`{c}`"),
            TokenKind::Op(op) => write!(f, "`{}`", op.text()),
            TokenKind::Pipe => write!(f, "`|`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

/// One lexeme with its 1-based source position.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: u32, column: u32, message: impl Into<String>) -> Error {
        Error::Lex {
            line,
            column,
            message: message.into(),
        }
    }

    fn string_body(&mut self, line: u32, column: u32) -> Result<String> {
        // The opening quote is already consumed. Escapes are `\"` and `\\`
        // only; raw newlines are legal inside strings.
        let mut body = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(self.error(line, column, "unterminated string literal"))
                }
                Some('"') => return Ok(body),
                Some('\\') => {
                    let (el, ec) = (self.line, self.column);
                    match self.bump() {
                        Some('"') => body.push('"'),
                        Some('\\') => body.push('\\'),
                        Some(c) => {
                            return Err(self.error(
                                el,
                                ec.saturating_sub(1),
                                format!("unknown escape `\\{c}` (only \\\" and \\\\ are recognized)"),
                            ))
                        }
                        None => {
                            return Err(self.error(line, column, "unterminated string literal"))
                        }
                    }
                }
                Some(c) => body.push(c),
            }
        }
    }

    fn number(&mut self, first: char, line: u32, column: u32) -> Result<TokenKind> {
        let mut lexeme = String::from(first);
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            lexeme.push(self.bump().unwrap());
        }
        let mut is_float = false;
        if self.peek() == Some('.') {
            is_float = true;
            lexeme.push(self.bump().unwrap());
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.error(
                    self.line,
                    self.column,
                    "expected digits after decimal point",
                ));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                lexeme.push(self.bump().unwrap());
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            is_float = true;
            lexeme.push(self.bump().unwrap());
            if matches!(self.peek(), Some('+' | '-')) {
                lexeme.push(self.bump().unwrap());
            }
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.error(self.line, self.column, "expected digits in exponent"));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                lexeme.push(self.bump().unwrap());
            }
        }
        if is_float {
            let value: f64 = lexeme
                .parse()
                .map_err(|e| self.error(line, column, format!("bad float literal: {e}")))?;
            if !value.is_finite() {
                return Err(self.error(line, column, "float literal out of range"));
            }
            Ok(TokenKind::Float(value))
        } else {
            let value: i64 = lexeme.parse().map_err(|_| {
                self.error(line, column, format!("integer literal {lexeme} overflows"))
            })?;
            Ok(TokenKind::Int(value))
        }
    }
}

/// Splits pipeline text into tokens, discarding whitespace and `#` comments.
/// The returned stream always ends with a single `Eof` token.
pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        while matches!(lexer.peek(), Some(c) if c.is_whitespace()) {
            lexer.bump();
        }
        if lexer.peek() == Some('#') {
            while !matches!(lexer.peek(), None | Some('\n')) {
                lexer.bump();
            }
            continue;
        }
        let (line, column) = (lexer.line, lexer.column);
        let Some(c) = lexer.bump() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                line,
                column,
            });
            return Ok(tokens);
        };
        let kind = match c {
            '(' | ')' | ',' | ':' => TokenKind::Punct(c),
            '|' => {
                if lexer.peek() == Some('|') {
                    lexer.bump();
                    TokenKind::Op(OpSym::Or)
                } else {
                    TokenKind::Pipe
                }
            }
            '&' => {
                if lexer.peek() == Some('&') {
                    lexer.bump();
                    TokenKind::Op(OpSym::And)
                } else {
                    return Err(lexer.error(line, column, "expected `&&`"));
                }
            }
            '!' => {
                if lexer.peek() == Some('=') {
                    lexer.bump();
                    TokenKind::Op(OpSym::Ne)
                } else {
                    TokenKind::Op(OpSym::Not)
                }
            }
            '=' => {
                if lexer.peek() == Some('=') {
                    lexer.bump();
                    TokenKind::Op(OpSym::Eq)
                } else {
                    return Err(lexer.error(line, column, "expected `==`"));
                }
            }
            '<' => {
                if lexer.peek() == Some('=') {
                    lexer.bump();
                    TokenKind::Op(OpSym::Le)
                } else {
                    TokenKind::Op(OpSym::Lt)
                }
            }
            '>' => {
                if lexer.peek() == Some('=') {
                    lexer.bump();
                    TokenKind::Op(OpSym::Ge)
                } else {
                    TokenKind::Op(OpSym::Gt)
                }
            }
            '"' => TokenKind::Str(lexer.string_body(line, column)?),
            '@' => {
                if lexer.bump() != Some('"') {
                    return Err(lexer.error(
                        line,
                        column,
                        "expected `\"` after `@` to open a timestamp literal",
                    ));
                }
                let body = lexer.string_body(line, column)?;
                let ts = Timestamp::parse(&body).map_err(|e| {
                    lexer.error(line, column, format!("bad timestamp literal: {e}"))
                })?;
                TokenKind::Timestamp(ts)
            }
            c if c.is_ascii_digit() => lexer.number(c, line, column)?,
            c if c.is_alphabetic() || c == '_' => {
                let mut name = String::from(c);
                while matches!(lexer.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    name.push(lexer.bump().unwrap());
                }
                TokenKind::Ident(name)
            }
            other => {
                return Err(lexer.error(line, column, format!("illegal character `{other}`")))
            }
        };
        tokens.push(Token { kind, line, column });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn empty_input_is_just_eof() {
        assert_eq!(kinds(""), vec![TokenKind::Eof]);
        assert_eq!(kinds("   \n# only a comment\n"), vec![TokenKind::Eof]);
    }

    #[test]
    fn source_call_tokens() {
        assert_eq!(
            kinds(r#"commits("log.jsonl")"#),
            vec![
                TokenKind::Ident("commits".into()),
                TokenKind::Punct('('),
                TokenKind::Str("log.jsonl".into()),
                TokenKind::Punct(')'),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn expression_tokens() {
        assert_eq!(
            kinds(r#"a == "x" && n >= 3"#),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Op(OpSym::Eq),
                TokenKind::Str("x".into()),
                TokenKind::Op(OpSym::And),
                TokenKind::Ident("n".into()),
                TokenKind::Op(OpSym::Ge),
                TokenKind::Int(3),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn pipe_versus_or() {
        assert_eq!(
            kinds("| ||"),
            vec![TokenKind::Pipe, TokenKind::Op(OpSym::Or), TokenKind::Eof]
        );
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            kinds(r#""a\"b\\c""#),
            vec![TokenKind::Str(r#"a"b\c"#.into()), TokenKind::Eof]
        );
        // Raw newlines are allowed inside strings.
        assert_eq!(
            kinds("\"two\nlines\""),
            vec![TokenKind::Str("two\nlines".into()), TokenKind::Eof]
        );
        let err = tokenize(r#""a\nb""#).unwrap_err();
        assert!(err.to_string().contains("unknown escape"), "{err}");
    }

    #[test]
    fn unterminated_string_reports_opening_quote() {
        let err = tokenize("filter(a == \"oops").unwrap_err();
        match err {
            Error::Lex { line, column, .. } => {
                assert_eq!((line, column), (1, 13));
            }
            other => panic!("expected lex error, got {other}"),
        }
    }

    #[test]
    fn timestamp_literals_validate_at_lex_time() {
        let tokens = tokenize(r#"@"2017-01-01T00:00:00Z""#).unwrap();
        assert!(matches!(tokens[0].kind, TokenKind::Timestamp(_)));
        let err = tokenize(r#"@"not a time""#).unwrap_err();
        assert!(err.to_string().contains("bad timestamp"), "{err}");
        let err = tokenize("@x").unwrap_err();
        assert!(err.to_string().contains('@'), "{err}");
    }

    #[test]
    fn numbers() {
        assert_eq!(kinds("42"), vec![TokenKind::Int(42), TokenKind::Eof]);
        assert_eq!(kinds("4.5"), vec![TokenKind::Float(4.5), TokenKind::Eof]);
        assert_eq!(kinds("1e3"), vec![TokenKind::Float(1000.0), TokenKind::Eof]);
        assert!(tokenize("99999999999999999999").is_err());
        assert!(tokenize("1.").is_err());
        assert!(tokenize("1e").is_err());
        let err = tokenize("1e400").unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn positions_are_one_based_and_track_lines() {
        let tokens = tokenize("count\n  | distinct").unwrap();
        assert_eq!((tokens[0].line, tokens[0].column), (1, 1));
        assert_eq!((tokens[1].line, tokens[1].column), (2, 3));
        assert_eq!((tokens[2].line, tokens[2].column), (2, 5));
        let eof = tokens.last().unwrap();
        assert_eq!((eof.line, eof.column), (2, 13));
    }

    #[test]
    fn illegal_characters_are_rejected() {
        for bad in ["$", "a ~ b", "=x", "&x"] {
            let err = tokenize(bad).unwrap_err();
            assert!(matches!(err, Error::Lex { .. }), "{bad:?}: {err}");
        }
    }
}
