//! Parser for the compact notation used in printed ideals, e.g.
//! `z(2x+y-z)`, `x^2(x-y)` or `2*x1*x3 - x2^2`.
//!
//! A run of letters and digits is split greedily into the longest known
//! variable names, so `xy` reads as `x*y` when both are variables.

use num_bigint::BigInt;
use num_traits::One;

use super::{Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse polynomial {input:?} at byte {pos}: {msg}")]
pub struct ParseError {
    pub input: String,
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str, names: &[String]) -> Result<Vec<(usize, Tok)>, ParseError> {
    let err = |pos: usize, msg: &str| ParseError {
        input: s.to_string(),
        pos,
        msg: msg.to_string(),
    };
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(s[start..i].parse().unwrap())));
            }
            c if c.is_ascii_alphabetic() => {
                let best = names
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| !n.is_empty() && s[i..].starts_with(n.as_str()))
                    .max_by_key(|(_, n)| n.len());
                let Some((k, n)) = best else {
                    return Err(err(i, "unknown variable"));
                };
                out.push((i, Tok::Var(k)));
                i += n.len();
            }
            _ => return Err(err(i, "unexpected character")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    input: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn err(&self, msg: &str) -> ParseError {
        let pos = self.toks.get(self.pos).map_or(self.input.len(), |t| t.0);
        ParseError {
            input: self.input.to_string(),
            pos,
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Poly<BigInt>, ParseError> {
        let mut acc = Poly::zero();
        let mut sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(Tok::Plus) => sign = 1,
                Some(Tok::Minus) => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly<BigInt>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                }
                Some(Tok::Num(_) | Tok::Var(_) | Tok::LParen) => {}
                _ => return Ok(acc),
            }
            acc = acc.mul(&self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Poly<BigInt>, ParseError> {
        let base = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Poly::constant(n)
            }
            Some(Tok::Var(k)) => {
                self.pos += 1;
                Poly::term(Monomial::var(k), BigInt::one())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                e
            }
            _ => return Err(self.err("expected a number, variable or '('")),
        };
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected an exponent")),
            }
        }
        Ok(base)
    }
}

/// Parse an integer polynomial in the named variables (variable `i` is
/// `names[i]`).
pub fn parse_poly(s: &str, names: &[String]) -> Result<Poly<BigInt>, ParseError> {
    let toks = tokenize(s, names)?;
    let mut p = Parser {
        toks,
        pos: 0,
        input: s,
    };
    if p.toks.is_empty() {
        return Err(p.err("empty expression"));
    }
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}
