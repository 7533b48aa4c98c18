//! Expression grammar for ring elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := rational | variable | '(' expr ')' | '-' base
//! ```
//!
//! Rationals are written `p/q` or as plain integers, whitespace is
//! insignificant, and the variables are `T`, `X`, `Y`, `z` plus the
//! shorthand `P`, which expands to `X + T*Y` when the tree is evaluated.
//! Unknown identifiers are rejected at parse time. Evaluation happens in the
//! extension ring, so any `z^2` immediately reduces through the relation and
//! results always have `z`-degree at most one.

use crate::poly::{Poly, Var};
use crate::rat::Rat;
use crate::rings::{ExtElem, ExtRingSpec};
use num_bigint::BigInt;
use std::fmt;
use thiserror::Error;

/// A variable usable in expressions: the base variables, the rectified
/// coordinate `P`, and the extension generator `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprVar {
    Base(Var),
    Z,
}

impl ExprVar {
    fn from_name(name: &str) -> Option<ExprVar> {
        if name == "z" {
            Some(ExprVar::Z)
        } else {
            Var::from_name(name).map(ExprVar::Base)
        }
    }
}

/// Abstract syntax tree of an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprAst {
    Number(Rat),
    Variable(ExprVar),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, u32),
}

impl ExprAst {
    /// Upper bound (saturating) on the total degree of the evaluated
    /// element. Front ends use this to refuse expressions whose evaluation
    /// would be astronomically large before any ring arithmetic runs.
    pub fn degree_bound(&self) -> u64 {
        match self {
            ExprAst::Number(_) => 0,
            ExprAst::Variable(_) => 1,
            ExprAst::Neg(inner) => inner.degree_bound(),
            ExprAst::Add(a, b) => a.degree_bound().max(b.degree_bound()),
            ExprAst::Mul(a, b) => a.degree_bound().saturating_add(b.degree_bound()),
            ExprAst::Pow(base, e) => base.degree_bound().saturating_mul(u64::from(*e)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnknownIdentifier(String),
    Expected {
        expected: Vec<&'static str>,
        found: String,
    },
    ZeroDenominator,
    ExponentTooLarge,
    TooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnknownIdentifier(name) => {
                write!(
                    f,
                    "unknown identifier `{name}`; the variables are T, X, Y, z, P"
                )
            }
            ParseErrorKind::Expected { expected, found } => {
                write!(f, "expected {}, found {found}", expected.join(" or "))
            }
            ParseErrorKind::ZeroDenominator => write!(f, "denominator is zero"),
            ParseErrorKind::ExponentTooLarge => write!(f, "exponent does not fit in 32 bits"),
            ParseErrorKind::TooDeep => write!(f, "expression nests too deeply"),
        }
    }
}

const MAX_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
enum TokenKind {
    Number(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(r) => format!("number `{r}`"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                tokens.push(Token {
                    kind: TokenKind::Plus,
                    offset: i,
                });
                i += 1;
            }
            '-' => {
                tokens.push(Token {
                    kind: TokenKind::Minus,
                    offset: i,
                });
                i += 1;
            }
            '*' => {
                tokens.push(Token {
                    kind: TokenKind::Star,
                    offset: i,
                });
                i += 1;
            }
            '^' => {
                tokens.push(Token {
                    kind: TokenKind::Caret,
                    offset: i,
                });
                i += 1;
            }
            '(' => {
                tokens.push(Token {
                    kind: TokenKind::LParen,
                    offset: i,
                });
                i += 1;
            }
            ')' => {
                tokens.push(Token {
                    kind: TokenKind::RParen,
                    offset: i,
                });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: BigInt = text[start..i].parse().expect("digits parse");
                let rat = if i < bytes.len() && bytes[i] == b'/' {
                    let slash = i;
                    i += 1;
                    let den_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if den_start == i {
                        return Err(ParseError {
                            offset: slash + 1,
                            kind: ParseErrorKind::Expected {
                                expected: vec!["unsigned integer"],
                                found: found_at(text, slash + 1),
                            },
                        });
                    }
                    let denom: BigInt = text[den_start..i].parse().expect("digits parse");
                    Rat::from_ratio(numer, denom).ok_or(ParseError {
                        offset: start,
                        kind: ParseErrorKind::ZeroDenominator,
                    })?
                } else {
                    Rat::from_bigint(numer)
                };
                tokens.push(Token {
                    kind: TokenKind::Number(rat),
                    offset: start,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            other => {
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(other),
                });
            }
        }
    }
    Ok(tokens)
}

fn found_at(text: &str, offset: usize) -> String {
    match text[offset..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.len, |t| t.offset)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".into(), |t| t.kind.describe())
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Expected {
                expected,
                found: self.found(),
            },
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Plus) => {
                    self.advance();
                    let rhs = self.term()?;
                    node = ExprAst::Add(Box::new(node), Box::new(rhs));
                }
                Some(TokenKind::Minus) => {
                    self.advance();
                    let rhs = self.term()?;
                    node = ExprAst::Add(Box::new(node), Box::new(ExprAst::Neg(Box::new(rhs))));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut node = self.factor()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Star)) {
            self.advance();
            let rhs = self.factor()?;
            node = ExprAst::Mul(Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.base()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.advance();
            let exponent = self.uint()?;
            return Ok(ExprAst::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let offset = self.offset();
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Number(r)) if r.is_integer() => {
                self.advance();
                r.to_u32().ok_or(ParseError {
                    offset,
                    kind: ParseErrorKind::ExponentTooLarge,
                })
            }
            _ => Err(self.error(vec!["unsigned integer"])),
        }
    }

    fn base(&mut self) -> Result<ExprAst, ParseError> {
        let offset = self.offset();
        if self.depth >= MAX_DEPTH {
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::TooDeep,
            });
        }
        self.depth += 1;
        let result = self.base_inner(offset);
        self.depth -= 1;
        result
    }

    fn base_inner(&mut self, offset: usize) -> Result<ExprAst, ParseError> {
        let Some(token) = self.advance() else {
            self.pos = self.tokens.len();
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::Expected {
                    expected: vec!["number", "variable", "`(`", "`-`"],
                    found: "end of input".into(),
                },
            });
        };
        match token.kind.clone() {
            TokenKind::Number(r) => Ok(ExprAst::Number(r)),
            TokenKind::Ident(name) => match ExprVar::from_name(&name) {
                Some(v) => Ok(ExprAst::Variable(v)),
                None => Err(ParseError {
                    offset,
                    kind: ParseErrorKind::UnknownIdentifier(name),
                }),
            },
            TokenKind::Minus => {
                let inner = self.base()?;
                Ok(ExprAst::Neg(Box::new(inner)))
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                match self.peek().map(|t| &t.kind) {
                    Some(TokenKind::RParen) => {
                        self.advance();
                        Ok(inner)
                    }
                    _ => Err(self.error(vec!["`+`", "`-`", "`*`", "`)`"])),
                }
            }
            other => Err(ParseError {
                offset,
                kind: ParseErrorKind::Expected {
                    expected: vec!["number", "variable", "`(`", "`-`"],
                    found: other.describe(),
                },
            }),
        }
    }
}

/// Parses an expression into its syntax tree.
pub fn parse_expr(text: &str) -> Result<ExprAst, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        len: text.len(),
        depth: 0,
    };
    let ast = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error(vec!["`+`", "`-`", "`*`", "end of input"]));
    }
    Ok(ast)
}

/// Evaluates a syntax tree in the extension ring. `P` expands to `X + T*Y`
/// first; powers of `z` reduce through the ring relation.
pub fn eval(ast: &ExprAst, spec: &ExtRingSpec) -> ExtElem {
    match ast {
        ExprAst::Number(r) => ExtElem::scalar(r.clone()),
        ExprAst::Variable(ExprVar::Z) => ExtElem::z(),
        ExprAst::Variable(ExprVar::Base(Var::P)) => {
            ExtElem::from_poly(&Poly::var(Var::X) + &(&Poly::var(Var::T) * &Poly::var(Var::Y)))
        }
        ExprAst::Variable(ExprVar::Base(v)) => ExtElem::from_poly(Poly::var(*v)),
        ExprAst::Neg(inner) => -&eval(inner, spec),
        ExprAst::Add(a, b) => &eval(a, spec) + &eval(b, spec),
        ExprAst::Mul(a, b) => eval(a, spec).mul(&eval(b, spec), spec),
        ExprAst::Pow(base, e) => eval(base, spec).pow(*e, spec),
    }
}

/// Convenience: parse then evaluate.
pub fn parse_and_eval(text: &str, spec: &ExtRingSpec) -> Result<ExtElem, ParseError> {
    Ok(eval(&parse_expr(text)?, spec))
}
