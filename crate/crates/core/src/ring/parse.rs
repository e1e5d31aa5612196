//! Text form of polynomials.
//!
//! Grammar: terms joined by `+`/`-`; a term is a `*`-product of factors, each
//! factor a coefficient `int` or `int/int`, or a variable optionally raised
//! to `^k`. Whitespace is insignificant.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{format_rational, Poly, Rational, Ring, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            _ if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
                continue;
            }
            _ if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(ParseError { position: start, message: format!("unexpected character `{c}`") })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.here(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.ring.zero();
        let mut sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            None => return self.err("empty polynomial"),
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(Tok::Plus) => sign = 1,
                Some(Tok::Minus) => sign = -1,
                None => return Ok(acc),
                _ => return self.err("expected `+` or `-`"),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; self.ring.nvars()];
        loop {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let mut value = Rational::from_integer(n);
                    if self.peek() == Some(&Tok::Slash) {
                        self.pos += 1;
                        match self.peek().cloned() {
                            Some(Tok::Int(d)) if !d.is_zero() => {
                                self.pos += 1;
                                value /= Rational::from_integer(d);
                            }
                            Some(Tok::Int(_)) => return self.err("division by zero"),
                            _ => return self.err("expected integer denominator"),
                        }
                    }
                    coeff *= value;
                }
                Some(Tok::Ident(name)) => {
                    let Some(idx) = self.ring.index_of(&name) else {
                        return self.err(format!("unknown variable `{name}`"));
                    };
                    self.pos += 1;
                    let mut k = 1u32;
                    if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        match self.peek().cloned() {
                            Some(Tok::Int(e)) => {
                                self.pos += 1;
                                k = match u32::try_from(e) {
                                    Ok(k) => k,
                                    Err(_) => return self.err("exponent too large"),
                                };
                            }
                            _ => return self.err("expected integer exponent"),
                        }
                    }
                    exps[idx] += k;
                }
                _ => return self.err("expected coefficient or variable"),
            }
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(self.ring.term(coeff, exps))
    }
}

pub(super) fn parse(ring: &Ring, text: &str) -> Result<Poly, RingError> {
    let toks = lex(text)?;
    let mut p = Parser { ring, toks, pos: 0, end: text.len() };
    Ok(p.expr()?)
}

fn monomial(ring: &Ring, exps: &[u32]) -> String {
    ring.vars()
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.name.clone() } else { format!("{}^{}", v.name, e) })
        .collect::<Vec<_>>()
        .join("*")
}

pub(super) fn format(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mono = monomial(p.ring(), m);
        if mono.is_empty() {
            out.push_str(&format_rational(&a));
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format_rational(&a));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ratio;

    #[test]
    fn grammar_instance() {
        let r = Ring::affine(3);
        let p = r.parse("3/2*x1^2*x2 - x3").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.terms()[0].1, ratio(3, 2));
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - x3");
    }

    #[test]
    fn cancellation_on_parse() {
        let r = Ring::affine(1);
        assert!(r.parse("x1 - x1").unwrap().is_zero());
        assert_eq!(r.parse("x1 - x1").unwrap().to_string(), "0");
    }

    #[test]
    fn canonical_string() {
        let r = Ring::affine(2);
        assert_eq!(r.parse("x2+x1").unwrap().to_string(), "x1 + x2");
        assert_eq!(r.parse(" - 2 * x2 ^2 +1").unwrap().to_string(), "-2*x2^2 + 1");
    }

    #[test]
    fn errors_carry_position() {
        let r = Ring::affine(2);
        match r.parse("x1 + * x2") {
            Err(RingError::Parse(e)) => assert_eq!(e.position, 5),
            other => panic!("{other:?}"),
        }
        match r.parse("x1 + y") {
            Err(RingError::Parse(e)) => assert_eq!(e.position, 5),
            other => panic!("{other:?}"),
        }
        match r.parse("x1 $") {
            Err(RingError::Parse(e)) => assert_eq!(e.position, 3),
            other => panic!("{other:?}"),
        }
        assert!(r.parse("").is_err());
        assert!(r.parse("1/0").is_err());
    }
}
