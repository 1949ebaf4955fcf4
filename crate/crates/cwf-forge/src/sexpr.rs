//! Minimal S-expression reader shared by every file format in the crate.
//!
//! Tokens are `(`, `)`, and atoms (any run of characters other than
//! whitespace and parentheses). Whitespace between tokens is
//! insignificant.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

impl ParseError {
    pub fn new(position: usize, expected: impl Into<String>) -> Self {
        ParseError {
            position,
            expected: expected.into(),
        }
    }
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Sexpr {
        Sexpr::Atom(s.into())
    }

    pub fn list(items: Vec<Sexpr>) -> Sexpr {
        Sexpr::List(items)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s) => Some(s),
            Sexpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::Atom(_) => None,
            Sexpr::List(items) => Some(items),
        }
    }

    /// Head keyword of a list form, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|items| items.first()).and_then(Sexpr::as_atom)
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(s) => write!(f, "{s}"),
            Sexpr::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Reader<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(input: &'a str) -> Self {
        Reader {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn read_expr(&mut self) -> Result<Sexpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(ParseError::new(self.pos, "an expression")),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ParseError::new(self.pos, "')'")),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexpr::List(items));
                        }
                        Some(_) => items.push(self.read_expr()?),
                    }
                }
            }
            Some(b')') => Err(ParseError::new(self.pos, "an expression, not ')'")),
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' {
                        break;
                    }
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.input[start..self.pos])
                    .map_err(|_| ParseError::new(start, "valid UTF-8 atom"))?;
                Ok(Sexpr::Atom(text.to_string()))
            }
        }
    }
}

/// Read a single S-expression; trailing input (other than whitespace) is an error.
pub fn read(input: &str) -> Result<Sexpr, ParseError> {
    let mut reader = Reader::new(input);
    let expr = reader.read_expr()?;
    reader.skip_ws();
    if reader.pos != reader.input.len() {
        return Err(ParseError::new(reader.pos, "end of input"));
    }
    Ok(expr)
}

/// Read a sequence of S-expressions up to end of input.
pub fn read_many(input: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut reader = Reader::new(input);
    let mut items = Vec::new();
    loop {
        reader.skip_ws();
        if reader.pos == reader.input.len() {
            return Ok(items);
        }
        items.push(reader.read_expr()?);
    }
}

/// An S-expression with the byte offset where it started, for error reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub start: usize,
    pub kind: SpannedKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpannedKind {
    Atom(String),
    List(Vec<Spanned>),
}

impl Spanned {
    pub fn head(&self) -> Option<&str> {
        match &self.kind {
            SpannedKind::List(items) => match items.first() {
                Some(Spanned {
                    kind: SpannedKind::Atom(s),
                    ..
                }) => Some(s),
                _ => None,
            },
            SpannedKind::Atom(_) => None,
        }
    }
}

impl<'a> Reader<'a> {
    fn read_spanned(&mut self) -> Result<Spanned, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::new(self.pos, "an expression")),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ParseError::new(self.pos, "')'")),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Spanned {
                                start,
                                kind: SpannedKind::List(items),
                            });
                        }
                        Some(_) => items.push(self.read_spanned()?),
                    }
                }
            }
            Some(b')') => Err(ParseError::new(self.pos, "an expression, not ')'")),
            Some(_) => {
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' {
                        break;
                    }
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.input[start..self.pos])
                    .map_err(|_| ParseError::new(start, "valid UTF-8 atom"))?;
                Ok(Spanned {
                    start,
                    kind: SpannedKind::Atom(text.to_string()),
                })
            }
        }
    }
}

/// Read a single spanned S-expression; trailing input is an error.
pub fn read_spanned(input: &str) -> Result<Spanned, ParseError> {
    let mut reader = Reader::new(input);
    let expr = reader.read_spanned()?;
    reader.skip_ws();
    if reader.pos != reader.input.len() {
        return Err(ParseError::new(reader.pos, "end of input"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = read("(a (b c) ())").unwrap();
        assert_eq!(
            e,
            Sexpr::list(vec![
                Sexpr::atom("a"),
                Sexpr::list(vec![Sexpr::atom("b"), Sexpr::atom("c")]),
                Sexpr::list(vec![]),
            ])
        );
    }

    #[test]
    fn display_round_trips() {
        let text = "(f (g x) y)";
        let e = read(text).unwrap();
        assert_eq!(e.to_string(), text);
    }

    #[test]
    fn reports_position_of_unbalanced_paren() {
        let err = read("(a (b)").unwrap_err();
        assert_eq!(err.position, 6);
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(read("(a) b").is_err());
    }
}
