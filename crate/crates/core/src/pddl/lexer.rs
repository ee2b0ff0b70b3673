//! Tokenizer and s-expression reader with source spans.

use std::fmt;

use super::error::{PddlError, PddlErrorCode};

/// Location of a token in the source text. Line and column are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Open,
    Close,
    Symbol(String),
    /// Whitespace and comments.
    Trivia,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Source text plus a line index for span lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlText {
    text: String,
    line_starts: Vec<usize>,
}

impl PddlText {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        PddlText { text, line_starts }
    }

    /// Decode bytes; invalid UTF-8 is a lexical error at the first bad byte.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PddlError> {
        match std::str::from_utf8(bytes) {
            Ok(s) => Ok(PddlText::new(s)),
            Err(e) => {
                let valid =
                    PddlText::new(String::from_utf8_lossy(&bytes[..e.valid_up_to()]).into_owned());
                Err(PddlError::new(
                    PddlErrorCode::Lexical,
                    "input is not valid UTF-8",
                    valid.span(e.valid_up_to(), 1),
                ))
            }
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn span(&self, offset: usize, len: usize) -> Span {
        let line_idx = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let col = self.text[self.line_starts[line_idx]..offset.min(self.text.len())]
            .chars()
            .count()
            + 1;
        Span {
            offset,
            len,
            line: line_idx + 1,
            col,
        }
    }

    /// Every token including trivia. The spans tile the text exactly.
    pub fn tokens(&self) -> Result<Vec<Token>, PddlError> {
        let bytes = self.text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let start = i;
            let c = self.text[i..].chars().next().unwrap_or('\0');
            let kind = if c.is_whitespace() {
                while i < bytes.len() {
                    let ch = self.text[i..].chars().next().unwrap_or('\0');
                    if !ch.is_whitespace() {
                        break;
                    }
                    i += ch.len_utf8();
                }
                TokenKind::Trivia
            } else if c == ';' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += self.text[i..].chars().next().map_or(1, char::len_utf8);
                }
                TokenKind::Trivia
            } else if c == '(' {
                i += 1;
                TokenKind::Open
            } else if c == ')' {
                i += 1;
                TokenKind::Close
            } else if is_symbol_char(c) {
                while i < bytes.len() && is_symbol_char(bytes[i] as char) {
                    i += 1;
                }
                TokenKind::Symbol(self.text[start..i].to_ascii_lowercase())
            } else {
                return Err(PddlError::new(
                    PddlErrorCode::Lexical,
                    format!("unexpected character {c:?}"),
                    self.span(start, c.len_utf8()),
                ));
            };
            out.push(Token {
                kind,
                span: self.span(start, i - start),
            });
        }
        Ok(out)
    }

    /// Read every top-level s-expression.
    pub fn read_all(&self) -> Result<Vec<Sexpr>, PddlError> {
        let tokens = self.tokens()?;
        let mut stack: Vec<(Span, Vec<Sexpr>)> = Vec::new();
        let mut top = Vec::new();
        for tok in tokens {
            match tok.kind {
                TokenKind::Trivia => {}
                TokenKind::Open => stack.push((tok.span, Vec::new())),
                TokenKind::Close => {
                    let Some((open, items)) = stack.pop() else {
                        return Err(PddlError::new(
                            PddlErrorCode::Unbalanced,
                            "unmatched `)`",
                            tok.span,
                        ));
                    };
                    let span = Span {
                        len: tok.span.offset + 1 - open.offset,
                        ..open
                    };
                    let node = Sexpr::List(items, span);
                    match stack.last_mut() {
                        Some((_, parent)) => parent.push(node),
                        None => top.push(node),
                    }
                }
                TokenKind::Symbol(s) => {
                    let node = Sexpr::Symbol(s, tok.span);
                    match stack.last_mut() {
                        Some((_, parent)) => parent.push(node),
                        None => top.push(node),
                    }
                }
            }
        }
        if let Some((open, _)) = stack.pop() {
            return Err(PddlError::new(
                PddlErrorCode::Unbalanced,
                "unclosed `(`",
                open,
            ));
        }
        Ok(top)
    }

    /// Read exactly one top-level s-expression.
    pub fn read_one(&self) -> Result<Sexpr, PddlError> {
        let mut all = self.read_all()?;
        match all.len() {
            1 => Ok(all.remove(0)),
            0 => Err(PddlError::new(
                PddlErrorCode::Syntax,
                "expected an s-expression, found nothing",
                self.span(0, self.text.len()),
            )),
            _ => Err(PddlError::new(
                PddlErrorCode::Syntax,
                "unexpected text after the first s-expression",
                all[1].span(),
            )),
        }
    }
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "-_?:.=<>+*/".contains(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Symbol(String, Span),
    List(Vec<Sexpr>, Span),
}

impl Sexpr {
    pub fn span(&self) -> Span {
        match self {
            Sexpr::Symbol(_, s) | Sexpr::List(_, s) => *s,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexpr::Symbol(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Symbol(..) => None,
        }
    }

    /// Head symbol of a list, e.g. `and` in `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|l| l.first())
            .and_then(Sexpr::as_symbol)
    }
}
