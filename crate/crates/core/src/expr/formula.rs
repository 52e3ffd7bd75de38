//! Infix formula text: `(NIR - Red) % (NIR + Red)`, `srt(Blue * rlog(SWIR))`.
//!
//! `%` is protected division; `*` and `%` bind tighter than `+` and `-`, all
//! left-associative. Nested binary operations are always parenthesised when
//! rendering, so a rendered formula parses back to the same tree.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::{BinaryOp, ExprError, ExprTree, UnaryOp};
use crate::schema::BandSchema;

/// Renders a tree with band names from `schema`. Constants are written in
/// shortest round-trip form.
///
/// # Panics
///
/// If the tree refers to a band the schema does not have.
pub fn to_formula(tree: &ExprTree, schema: &BandSchema) -> String {
    let mut out = String::new();
    render(tree, schema, true, &mut out, &|c, out| {
        let _ = write!(out, "{c}");
    });
    out
}

/// Canonical rendering used to identify subexpressions: every binary node is
/// parenthesised and constants are rounded to 6 significant digits.
pub fn canonical_formula(tree: &ExprTree, schema: &BandSchema) -> String {
    let mut out = String::new();
    render(tree, schema, false, &mut out, &|c, out| {
        out.push_str(&six_significant(c));
    });
    out
}

fn six_significant(c: f64) -> String {
    let rounded: f64 = format!("{c:.5e}").parse().unwrap_or(c);
    format!("{rounded}")
}

fn render(
    tree: &ExprTree,
    schema: &BandSchema,
    top: bool,
    out: &mut String,
    constant: &dyn Fn(f64, &mut String),
) {
    match tree {
        ExprTree::Band(i) => {
            let name = schema
                .band_name(*i)
                .unwrap_or_else(|| panic!("band index {i} not in schema `{}`", schema.sensor()));
            out.push_str(name);
        }
        ExprTree::Const(c) => constant(*c, out),
        ExprTree::Unary(op, child) => {
            out.push_str(op.symbol());
            out.push('(');
            render(child, schema, true, out, constant);
            out.push(')');
        }
        ExprTree::Binary(op, l, r) => {
            if !top {
                out.push('(');
            }
            render(l, schema, false, out, constant);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            render(r, schema, false, out, constant);
            if !top {
                out.push(')');
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(BinaryOp),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(offset: usize, message: &str) -> ExprError {
        ExprError::Parse {
            offset,
            message: message.to_string(),
        }
    }

    fn tokenize(src: &'a str) -> Result<Vec<(usize, Token)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (at, tok) = lx.next_token()?;
            let end = tok == Token::End;
            out.push((at, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn next_token(&mut self) -> Result<(usize, Token), ExprError> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let Some(c) = trimmed.chars().next() else {
            return Ok((start, Token::End));
        };
        let single = |tok| (c.len_utf8(), tok);
        let (len, tok) = match c {
            '+' => single(Token::Op(BinaryOp::Add)),
            '-' | '\u{2212}' => single(Token::Op(BinaryOp::Sub)),
            '*' => single(Token::Op(BinaryOp::Mul)),
            '%' => single(Token::Op(BinaryOp::Pdiv)),
            '(' => single(Token::LParen),
            ')' => single(Token::RParen),
            c if c.is_ascii_digit() || c == '.' => {
                let len = number_len(trimmed);
                let text = &trimmed[..len];
                let value: f64 = text
                    .parse()
                    .map_err(|_| Self::err(start, "malformed number"))?;
                (len, Token::Number(value))
            }
            c if c.is_alphabetic() || c == '_' => {
                let len = trimmed
                    .char_indices()
                    .find(|&(_, ch)| !(ch.is_alphanumeric() || ch == '_'))
                    .map_or(trimmed.len(), |(i, _)| i);
                (len, Token::Ident(trimmed[..len].to_string()))
            }
            _ => return Err(Self::err(start, &format!("unexpected character `{c}`"))),
        };
        self.pos += len;
        Ok((start, tok))
    }
}

fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

struct Parser<'s> {
    tokens: Vec<(usize, Token)>,
    at: usize,
    schema: &'s BandSchema,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.at].0
    }

    fn bump(&mut self) -> (usize, Token) {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self) -> ExprError {
        let message = match self.peek() {
            Token::End => "unexpected end of input".to_string(),
            Token::RParen => "unexpected `)`".to_string(),
            Token::LParen => "unexpected `(`".to_string(),
            Token::Op(op) => format!("unexpected operator `{op}`"),
            Token::Number(_) => "unexpected number".to_string(),
            Token::Ident(name) => format!("unexpected identifier `{name}`"),
        };
        ExprError::Parse {
            offset: self.offset(),
            message,
        }
    }

    fn expr(&mut self) -> Result<ExprTree, ExprError> {
        let mut left = self.term()?;
        while let Token::Op(op @ (BinaryOp::Add | BinaryOp::Sub)) = *self.peek() {
            self.bump();
            let right = self.term()?;
            left = ExprTree::binary(op, left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<ExprTree, ExprError> {
        let mut left = self.factor()?;
        while let Token::Op(op @ (BinaryOp::Mul | BinaryOp::Pdiv)) = *self.peek() {
            self.bump();
            let right = self.factor()?;
            left = ExprTree::binary(op, left, right);
        }
        Ok(left)
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if *self.peek() == Token::RParen {
            self.bump();
            Ok(())
        } else {
            Err(match self.peek() {
                Token::End => ExprError::Parse {
                    offset: self.offset(),
                    message: "missing `)`".to_string(),
                },
                _ => self.unexpected(),
            })
        }
    }

    fn factor(&mut self) -> Result<ExprTree, ExprError> {
        match self.peek().clone() {
            Token::Number(v) => {
                self.bump();
                Ok(ExprTree::Const(v))
            }
            // Negative literal: only directly before a number.
            Token::Op(BinaryOp::Sub) if matches!(self.tokens[self.at + 1].1, Token::Number(_)) => {
                self.bump();
                let (_, Token::Number(v)) = self.bump() else {
                    unreachable!()
                };
                Ok(ExprTree::Const(-v))
            }
            Token::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::Ident(name) => {
                let offset = self.offset();
                self.bump();
                let func = match name.as_str() {
                    "srt" => Some(UnaryOp::Srt),
                    "rlog" => Some(UnaryOp::Rlog),
                    _ => None,
                };
                match func {
                    Some(op) if *self.peek() == Token::LParen => {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        Ok(ExprTree::unary(op, arg))
                    }
                    _ => self
                        .schema
                        .index_of(&name)
                        .map(ExprTree::Band)
                        .ok_or(ExprError::UnknownBand { name, offset }),
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an infix formula, resolving band names against `schema`.
pub fn parse_formula(text: &str, schema: &BandSchema) -> Result<ExprTree, ExprError> {
    let tokens = Lexer::tokenize(text)?;
    let mut p = Parser {
        tokens,
        at: 0,
        schema,
    };
    let tree = p.expr()?;
    if *p.peek() != Token::End {
        return Err(p.unexpected());
    }
    Ok(tree)
}
