//! Exact sparse multivariate polynomials over the rationals.
//!
//! A [`Ring`] fixes the ordered variable list and the term order; every
//! [`Poly`] carries the ring it lives in. Terms are kept sorted strictly
//! descending in the term order with no zero coefficients, so structural
//! equality coincides with mathematical equality.

mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::ParseError;

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring context mismatch")]
    ContextMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable name collision: `{0}`")]
    NameCollision(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("polynomial uses variable `{0}` which is absent from the target ring")]
    NotRepresentable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    /// Coordinate of the affine space.
    Space,
    /// The homotopy parameter.
    Homotopy,
    /// A parameter of a family.
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

impl Variable {
    pub fn space(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: VarKind::Space }
    }

    pub fn homotopy(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: VarKind::Homotopy }
    }

    pub fn parameter(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: VarKind::Parameter }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermOrder {
    #[default]
    Grevlex,
    Lex,
}

impl TermOrder {
    /// Compares exponent vectors; variable precedence is the vector index.
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            TermOrder::Lex => a.cmp(b),
            TermOrder::Grevlex => {
                let da: u64 = a.iter().map(|&e| e as u64).sum();
                let db: u64 = b.iter().map(|&e| e as u64).sum();
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.iter().zip(b).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct RingInner {
    vars: Vec<Variable>,
    order: TermOrder,
}

/// Polynomial ring context: ordered variables plus a term order.
#[derive(Clone)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[{}]", self.names().join(","))?;
        if self.order() == TermOrder::Lex {
            write!(f, "/lex")?;
        }
        Ok(())
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ring {
    pub fn new(vars: Vec<Variable>, order: TermOrder) -> Result<Self, RingError> {
        for (i, v) in vars.iter().enumerate() {
            if !valid_name(&v.name) {
                return Err(RingError::InvalidName(v.name.clone()));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(RingError::NameCollision(v.name.clone()));
            }
        }
        Ok(Ring(Arc::new(RingInner { vars, order })))
    }

    /// `Q[x1, …, xn]` with the default order.
    pub fn affine(n: usize) -> Self {
        Self::new((1..=n).map(|i| Variable::space(format!("x{i}"))).collect(), TermOrder::Grevlex)
            .expect("generated names are valid")
    }

    pub fn vars(&self) -> &[Variable] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn order(&self) -> TermOrder {
        self.0.order
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v.name == name)
    }

    pub fn indices_of_kind(&self, kind: VarKind) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.0.vars[i].kind == kind).collect()
    }

    /// Indices of the space coordinates, in order.
    pub fn space_indices(&self) -> Vec<usize> {
        self.indices_of_kind(VarKind::Space)
    }

    pub fn space_dim(&self) -> usize {
        self.space_indices().len()
    }

    pub fn with_order(&self, order: TermOrder) -> Ring {
        Ring(Arc::new(RingInner { vars: self.0.vars.clone(), order }))
    }

    /// Extends the ring by new variables. Variables are kept grouped by kind
    /// (space, homotopy, parameter), which fixes the precedence
    /// `x1 > … > xn > t > s1 > …`.
    pub fn adjoin(&self, extra: &[Variable]) -> Result<Ring, RingError> {
        let mut vars = self.0.vars.clone();
        for v in extra {
            if vars.iter().any(|w| w.name == v.name) {
                return Err(RingError::NameCollision(v.name.clone()));
            }
            vars.push(v.clone());
        }
        vars.sort_by_key(|v| v.kind);
        Ring::new(vars, self.0.order)
    }

    /// Removes the named variables.
    pub fn without(&self, names: &[&str]) -> Result<Ring, RingError> {
        for n in names {
            if self.index_of(n).is_none() {
                return Err(RingError::UnknownVariable(n.to_string()));
            }
        }
        let vars = self.0.vars.iter().filter(|v| !names.contains(&v.name.as_str())).cloned().collect();
        Ring::new(vars, self.0.order)
    }

    /// A name not yet used in this ring, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        (0..).map(|i| format!("{base}_{i}")).find(|n| self.index_of(n).is_none()).unwrap()
    }

    pub fn zero(&self) -> Poly {
        Poly { ring: self.clone(), terms: Vec::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(Rational::one())
    }

    pub fn constant(&self, c: Rational) -> Poly {
        self.term(c, vec![0; self.nvars()])
    }

    pub fn int(&self, n: i64) -> Poly {
        self.constant(rat(n))
    }

    pub fn term(&self, c: Rational, exps: Vec<u32>) -> Poly {
        assert_eq!(exps.len(), self.nvars(), "exponent vector length");
        if c.is_zero() {
            return self.zero();
        }
        Poly { ring: self.clone(), terms: vec![(exps, c)] }
    }

    /// The variable at `index` as a polynomial.
    pub fn var(&self, index: usize) -> Poly {
        let mut e = vec![0; self.nvars()];
        e[index] = 1;
        self.term(Rational::one(), e)
    }

    pub fn var_named(&self, name: &str) -> Result<Poly, RingError> {
        self.index_of(name)
            .map(|i| self.var(i))
            .ok_or_else(|| RingError::UnknownVariable(name.to_string()))
    }

    /// Builds a polynomial from arbitrary terms, combining and sorting.
    pub fn from_terms(&self, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Poly {
        let mut terms: Vec<_> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let order = self.order();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<(Vec<u32>, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            assert_eq!(m.len(), self.nvars(), "exponent vector length");
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { ring: self.clone(), terms: out }
    }

    pub fn parse(&self, text: &str) -> Result<Poly, RingError> {
        parse::parse(self, text)
    }
}

/// Whether `a` divides `b` as monomials.
pub fn mono_divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn mono_lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn mono_div(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn mono_mul(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn mono_degree(a: &[u32]) -> u32 {
    a.iter().sum()
}

pub fn mono_coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Sparse polynomial in canonical form.
#[derive(Clone)]
pub struct Poly {
    ring: Ring,
    terms: Vec<(Vec<u32>, Rational)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::format(self))
    }
}

impl Poly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Vec<u32>, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.iter().all(|&e| e == 0) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn leading_monomial(&self) -> Option<&[u32]> {
        self.terms.first().map(|(m, _)| m.as_slice())
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.first().map(|(_, c)| c)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| mono_degree(m)).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[var]).max().unwrap_or(0)
    }

    /// Degree counting only the given variables.
    pub fn degree_over(&self, vars: &[usize]) -> u32 {
        self.terms.iter().map(|(m, _)| vars.iter().map(|&v| m[v]).sum()).max().unwrap_or(0)
    }

    /// Variables that occur with a positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&v| self.terms.iter().any(|(m, _)| m[v] > 0)).collect()
    }

    fn check(&self, other: &Poly) -> Result<(), RingError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(RingError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, RingError> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, RingError> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, RingError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let order = self.ring.order();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => order.cmp(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &other.terms[j];
                    out.push((m.clone(), if negate { -c } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &self.terms[i].1 - &other.terms[j].1
                    } else {
                        &self.terms[i].1 + &other.terms[j].1
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { ring: self.ring.clone(), terms: out }
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return self.ring.zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut acc = self.ring.zero();
        // Multiply by the shorter operand term-wise, merging sorted partial products.
        let (short, long) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        for (m, c) in &short.terms {
            acc = acc.merge(&long.mul_term(c, m), false);
        }
        acc
    }

    /// `c * m * self`; the term order is multiplicative so sortedness is kept.
    pub fn mul_term(&self, c: &Rational, m: &[u32]) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(e, d)| (mono_mul(e, m), d * c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading_coefficient() {
            Some(c) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = self.ring.one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to the variable at `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self.terms.iter().filter(|(m, _)| m[var] > 0).map(|(m, c)| {
            let mut e = m.clone();
            e[var] -= 1;
            (e, c * rat(m[var] as i64))
        });
        // Removing one from a fixed coordinate preserves relative order only for
        // lex; re-sort in general.
        self.ring.from_terms(terms)
    }

    pub fn derivative_named(&self, name: &str) -> Result<Poly, RingError> {
        let i = self.ring.index_of(name).ok_or_else(|| RingError::UnknownVariable(name.to_string()))?;
        Ok(self.derivative(i))
    }

    /// Evaluates at a full point (one value per ring variable).
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.ring.nvars(), "point dimension");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a value for one variable; the result stays in the same ring.
    pub fn substitute(&self, var: usize, value: &Rational) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = m.clone();
            let k = std::mem::replace(&mut e[var], 0);
            (e, c * num_traits::pow(value.clone(), k as usize))
        });
        self.ring.from_terms(terms)
    }

    /// Substitutes a polynomial for one variable.
    pub fn compose(&self, var: usize, value: &Poly) -> Poly {
        assert_eq!(self.ring, value.ring, "ring context");
        let mut acc = self.ring.zero();
        let mut powers: Vec<Poly> = vec![self.ring.one()];
        for (m, c) in &self.terms {
            let k = m[var] as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut e = m.clone();
            e[var] = 0;
            acc = &acc + &powers[k].mul_term(c, &e);
        }
        acc
    }

    /// Re-expresses the polynomial in another ring by variable name.
    pub fn embed(&self, target: &Ring) -> Result<Poly, RingError> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.ring.vars().iter().map(|v| target.index_of(&v.name)).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &k) in m.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] = k,
                    None => return Err(RingError::NotRepresentable(self.ring.vars()[i].name.clone())),
                }
            }
            terms.push((e, c.clone()));
        }
        Ok(target.from_terms(terms))
    }

    /// Views the polynomial in `self.ring` extended by `vars`.
    pub fn adjoin_variables(&self, vars: &[Variable]) -> Result<Poly, RingError> {
        let ring = self.ring.adjoin(vars)?;
        self.embed(&ring)
    }

    /// Substitutes `value` for the named variable and drops it from the ring.
    pub fn specialize(&self, name: &str, value: &Rational) -> Result<Poly, RingError> {
        let i = self.ring.index_of(name).ok_or_else(|| RingError::UnknownVariable(name.to_string()))?;
        let smaller = self.ring.without(&[name])?;
        self.substitute(i, value).embed(&smaller)
    }

    /// Builds from terms already sorted strictly descending with no zeros.
    pub(crate) fn from_sorted_terms(ring: &Ring, terms: Vec<(Vec<u32>, Rational)>) -> Poly {
        debug_assert!(terms.windows(2).all(|w| ring.order().cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Poly { ring: ring.clone(), terms }
    }

    /// Removes and returns the leading term.
    pub(crate) fn pop_leading(&mut self) -> Option<(Vec<u32>, Rational)> {
        if self.terms.is_empty() {
            None
        } else {
            Some(self.terms.remove(0))
        }
    }

    /// `self -= c * m * g`.
    pub(crate) fn sub_mul_term(&mut self, c: &Rational, m: &[u32], g: &Poly) {
        let prod = g.mul_term(c, m);
        *self = self.merge(&prod, true);
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.checked_add(rhs).expect("ring context mismatch in add")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.checked_sub(rhs).expect("ring context mismatch in sub")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.checked_mul(rhs).expect("ring context mismatch in mul")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Parses a rational literal such as `3`, `-2/7`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> Ring {
        Ring::affine(2)
    }

    #[test]
    fn additive_inverse() {
        let r = r2();
        let x1 = r.var(0);
        assert!((&x1 + &(-&x1)).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let r = r2();
        let (x1, x2) = (r.var(0), r.var(1));
        let p = &(&x1 + &x2) * &(&x1 - &x2);
        assert_eq!(p, r.parse("x1^2 - x2^2").unwrap());
    }

    #[test]
    fn rational_scale_inverse() {
        let r = r2();
        let p = r.var(0).scale(&ratio(2, 3));
        assert_eq!(p.scale(&ratio(3, 2)), r.var(0));
    }

    #[test]
    fn power_rule_derivatives() {
        let r = r2();
        let p = r.parse("x1^2*x2").unwrap();
        assert_eq!(p.derivative(0), r.parse("2*x1*x2").unwrap());
        assert!(r.var(1).derivative(0).is_zero());
        assert_eq!(r.parse("x1^3 - x2").unwrap().derivative(0), r.parse("3*x1^2").unwrap());
    }

    #[test]
    fn adjoin_and_specialize() {
        let r = Ring::affine(1);
        let p = r.parse("x1 + 1").unwrap();
        let q = p.adjoin_variables(&[Variable::homotopy("t")]).unwrap();
        assert_eq!(q.ring().names(), vec!["x1", "t"]);
        assert_eq!(q.to_string(), "x1 + 1");
        assert!(r.zero().adjoin_variables(&[Variable::homotopy("t")]).unwrap().is_zero());

        let r = r2();
        let p = r.parse("x2").unwrap().adjoin_variables(&[Variable::parameter("s1")]).unwrap();
        let s1x1 = p.ring().parse("s1*x1 + x2").unwrap();
        assert_eq!(s1x1.specialize("s1", &rat(0)).unwrap(), r.parse("x2").unwrap());
        assert_eq!(p.embed(&r).unwrap(), r.parse("x2").unwrap());
    }

    #[test]
    fn adjoin_collision() {
        let r = r2();
        assert_eq!(
            r.var(0).adjoin_variables(&[Variable::parameter("x2")]),
            Err(RingError::NameCollision("x2".into()))
        );
    }

    #[test]
    fn adjoin_keeps_kind_precedence() {
        let r = r2().adjoin(&[Variable::parameter("s1")]).unwrap();
        let r = r.adjoin(&[Variable::homotopy("t")]).unwrap();
        assert_eq!(r.names(), vec!["x1", "x2", "t", "s1"]);
    }

    #[test]
    fn mismatch_is_reported() {
        let a = Ring::affine(1).var(0);
        let b = Ring::affine(2).var(0);
        assert_eq!(a.checked_add(&b), Err(RingError::ContextMismatch));
    }

    #[test]
    fn grevlex_order() {
        let o = TermOrder::Grevlex;
        // x1 > x2 > x3, degree first, then reverse lex.
        assert_eq!(o.cmp(&[1, 0, 0], &[0, 1, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[0, 0, 2], &[1, 0, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0, 1], &[0, 2, 0]), Ordering::Less);
        assert_eq!(o.cmp(&[2, 0, 0], &[1, 1, 0]), Ordering::Greater);
    }

    #[test]
    fn compose_substitutes_polynomial() {
        let r = r2();
        let p = r.parse("x1^2 + x2").unwrap();
        let q = p.compose(0, &r.parse("x2 + 1").unwrap());
        assert_eq!(q, r.parse("x2^2 + 3*x2 + 1").unwrap());
    }
}
