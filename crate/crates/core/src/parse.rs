//! Text grammar for polynomials.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := atom ['^' ['-'] int]
//! atom   := int ['/' int] | ident | '(' expr ')'
//! ```
//!
//! The `Display` output of a polynomial parses back to an equal polynomial.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::{PolyError, Polynomial, VarContext};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse {
        pos,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(src[start..i].parse().unwrap())));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            other => return Err(err(i, format!("unexpected character `{other}`"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Arc<VarContext>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = Polynomial::zero(self.ctx);
        let mut negate = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                _ => return Ok(acc),
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                }
                Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {}
                _ => return Ok(acc),
            }
            let f = self.factor()?;
            acc = &acc * &f;
        }
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.at();
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let e: i32 = match self.bump() {
            Some(Tok::Int(n)) => n
                .try_into()
                .map_err(|_| err(at, "exponent out of range"))?,
            _ => return Err(err(at, "expected integer exponent")),
        };
        let e = if neg { -e } else { e };
        base.powi(e)
            .ok_or_else(|| err(at, "negative power of a non-unit"))
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let at = self.at();
        match self.bump() {
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dat = self.at();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => Ok(Polynomial::constant(
                            self.ctx,
                            BigRational::new(n, d),
                        )),
                        _ => Err(err(dat, "expected nonzero denominator")),
                    }
                } else {
                    Ok(Polynomial::constant(self.ctx, BigRational::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => Polynomial::var(self.ctx, &name),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(self.at(), "expected `)`")),
                }
            }
            Some(t) => Err(err(at, format!("unexpected token {t:?}"))),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

pub(crate) fn parse_polynomial(ctx: &Arc<VarContext>, src: &str) -> Result<Polynomial, PolyError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(err(0, "empty input"));
    }
    let mut p = Parser {
        ctx,
        toks,
        pos: 0,
        end: src.len(),
    };
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(err(p.at(), "trailing input"));
    }
    Ok(out)
}
