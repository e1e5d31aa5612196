//! Ideals, reduced Gröbner bases and membership certificates.
//!
//! Verdicts are over the rationals. Unit-ideal and membership answers are
//! unchanged when passing to the complex numbers (a linear system with
//! rational data solvable over C is solvable over Q), which is what the
//! geometric statements about complex affine space need.

mod buchberger;
mod linear;

use std::sync::OnceLock;

use thiserror::Error;

use crate::ring::{Poly, Ring, RingError};

pub use buchberger::GroebnerStats;
pub use linear::{degree_bounded_linear_solve, degree_bounded_preimage, monomials_up_to, LinearConstraint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Limits on a single basis computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: usize,
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_pairs: 200_000, max_degree: 40 }
    }
}

/// `target = Σ cofactor · generators[index]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub target: Poly,
    pub cofactors: Vec<(usize, Poly)>,
}

impl MembershipCertificate {
    pub(crate) fn from_dense(target: Poly, dense: Vec<Poly>) -> Self {
        let cofactors = dense.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        Self { target, cofactors }
    }

    /// Σ cofactor · generator.
    pub fn expand(&self, generators: &[Poly]) -> Option<Poly> {
        let mut acc = self.target.ring().zero();
        for (i, c) in &self.cofactors {
            let g = generators.get(*i)?;
            acc = acc.checked_add(&c.checked_mul(g).ok()?).ok()?;
        }
        Some(acc)
    }

    /// Re-checks the identity by ring arithmetic only.
    pub fn verify(&self, generators: &[Poly]) -> bool {
        self.expand(generators).is_some_and(|e| e == self.target)
    }

    /// Certificate for `a·target` from one for `target`.
    pub fn scaled_by(&self, a: &Poly) -> Self {
        Self {
            target: &self.target * a,
            cofactors: self.cofactors.iter().map(|(i, c)| (*i, c * a)).collect(),
        }
    }

    /// Re-indexes the generators through `map`.
    pub fn reindex(&self, map: impl Fn(usize) -> usize) -> Self {
        Self { target: self.target.clone(), cofactors: self.cofactors.iter().map(|(i, c)| (map(*i), c.clone())).collect() }
    }

    pub fn embed(&self, ring: &Ring) -> Result<Self, RingError> {
        Ok(Self {
            target: self.target.embed(ring)?,
            cofactors: self.cofactors.iter().map(|(i, c)| Ok((*i, c.embed(ring)?))).collect::<Result<_, RingError>>()?,
        })
    }
}

/// Reduced Gröbner basis whose elements can be written in the input generators.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub elements: Vec<Poly>,
    pub stats: GroebnerStats,
    nodes: Vec<usize>,
    trace: buchberger::Trace,
    width: usize,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_one()
    }

    /// Dense cofactors over the generators of `Σ quotients[i] · elements[i]`.
    pub fn express(&self, quotients: &[Poly]) -> Vec<Poly> {
        let ring = self.elements.first().map(|e| e.ring().clone());
        let Some(ring) = ring else { return Vec::new() };
        let combination: Vec<(Poly, usize)> =
            quotients.iter().zip(&self.nodes).map(|(q, &k)| (q.clone(), k)).collect();
        self.trace.expand(&ring, &combination, self.width)
    }

    /// `elements[i] = Σ_j representation[i][j] · generators[j]`.
    pub fn representation(&self) -> Vec<Vec<Poly>> {
        (0..self.elements.len())
            .map(|i| {
                let ring = self.elements[i].ring();
                let q: Vec<Poly> = (0..self.elements.len()).map(|k| if k == i { ring.one() } else { ring.zero() }).collect();
                self.express(&q)
            })
            .collect()
    }

    /// Checks both inclusions by explicit cofactors: every element is the
    /// stated combination of generators, and every generator reduces to zero.
    pub fn certify_equivalence(&self, generators: &[Poly]) -> bool {
        let forward = self.elements.iter().zip(self.representation()).all(|(e, repr)| {
            let cert = MembershipCertificate::from_dense(e.clone(), repr.clone());
            cert.verify(generators)
        });
        let divisors: Vec<&Poly> = self.elements.iter().collect();
        let backward = generators.iter().all(|g| {
            let (r, q) = buchberger::reduce(g, &divisors);
            if !r.is_zero() {
                return false;
            }
            let dense: Vec<Poly> = q;
            MembershipCertificate::from_dense(g.clone(), dense).verify(&self.elements)
        });
        forward && backward
    }
}

/// Finitely generated ideal with a lazily computed reduced basis.
#[derive(Debug, Clone)]
pub struct Ideal {
    ring: Ring,
    generators: Vec<Poly>,
    budget: Budget,
    cache: OnceLock<GroebnerBasis>,
}

impl Ideal {
    /// Zero generators are dropped; the remaining order is kept.
    pub fn new(ring: &Ring, generators: Vec<Poly>) -> Result<Self, RingError> {
        for g in &generators {
            if g.ring() != ring {
                return Err(RingError::ContextMismatch);
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Self { ring: ring.clone(), generators, budget: Budget::default(), cache: OnceLock::new() })
    }

    pub fn principal(p: Poly) -> Self {
        let ring = p.ring().clone();
        Self::new(&ring, vec![p]).expect("same ring")
    }

    pub fn zero(ring: &Ring) -> Self {
        Self::new(ring, Vec::new()).expect("no generators")
    }

    pub fn unit(ring: &Ring) -> Self {
        Self::principal(ring.one())
    }

    pub fn parse(ring: &Ring, gens: &[&str]) -> Result<Self, RingError> {
        let g = gens.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, g)
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        if budget != self.budget {
            self.budget = budget;
            self.cache = OnceLock::new();
        }
        self
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    /// The ideal with extra generators appended.
    pub fn extended(&self, extra: impl IntoIterator<Item = Poly>) -> Result<Self, RingError> {
        let mut g = self.generators.clone();
        g.extend(extra);
        Ok(Self::new(&self.ring, g)?.with_budget(self.budget))
    }

    /// The same generators viewed in a larger ring.
    pub fn embed(&self, ring: &Ring) -> Result<Self, RingError> {
        let g = self.generators.iter().map(|p| p.embed(ring)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(ring, g)?.with_budget(self.budget))
    }

    pub fn reduced_basis(&self) -> Result<&GroebnerBasis, GroebnerError> {
        if let Some(b) = self.cache.get() {
            return Ok(b);
        }
        let (tracked, trace, stats) = buchberger::compute(&self.ring, &self.generators, &self.budget)?;
        let basis = GroebnerBasis {
            elements: tracked.iter().map(|t| t.poly.clone()).collect(),
            stats,
            nodes: tracked.iter().map(|t| t.node).collect(),
            trace,
            width: self.generators.len(),
        };
        let _ = self.cache.set(basis);
        Ok(self.cache.get().expect("just set"))
    }

    /// Unique remainder and a certificate for `p - remainder`.
    pub fn normal_form(&self, p: &Poly) -> Result<(Poly, MembershipCertificate), GroebnerError> {
        if p.ring() != &self.ring {
            return Err(RingError::ContextMismatch.into());
        }
        let basis = self.reduced_basis()?;
        let divisors: Vec<&Poly> = basis.elements.iter().collect();
        let (rem, quotients) = buchberger::reduce(p, &divisors);
        let dense = basis.express(&quotients);
        let target = p - &rem;
        Ok((rem, MembershipCertificate::from_dense(target, dense)))
    }

    /// Remainder only; skips cofactor assembly.
    pub fn reduce(&self, p: &Poly) -> Result<Poly, GroebnerError> {
        if p.ring() != &self.ring {
            return Err(RingError::ContextMismatch.into());
        }
        let basis = self.reduced_basis()?;
        let divisors: Vec<&Poly> = basis.elements.iter().collect();
        Ok(buchberger::reduce(p, &divisors).0)
    }

    pub fn membership(&self, p: &Poly) -> Result<Option<MembershipCertificate>, GroebnerError> {
        let (rem, cert) = self.normal_form(p)?;
        Ok(rem.is_zero().then_some(cert))
    }

    pub fn contains(&self, p: &Poly) -> Result<bool, GroebnerError> {
        Ok(self.reduce(p)?.is_zero())
    }

    /// `Some(certificate for 1)` iff the ideal is the whole ring, i.e. the
    /// generators have no common complex zero.
    pub fn is_unit_ideal(&self) -> Result<Option<MembershipCertificate>, GroebnerError> {
        let basis = self.reduced_basis()?;
        if !basis.is_unit() {
            return Ok(None);
        }
        let cert = MembershipCertificate::from_dense(self.ring.one(), basis.express(&[self.ring.one()]));
        Ok(Some(cert))
    }

    /// Whether every generator of `other` lies in `self`.
    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool, GroebnerError> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Equality of ideals via their reduced bases.
pub fn ideal_equal(a: &Ideal, b: &Ideal) -> Result<bool, GroebnerError> {
    if a.ring() != b.ring() {
        return Err(RingError::ContextMismatch.into());
    }
    Ok(a.reduced_basis()?.elements == b.reduced_basis()?.elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, Ring};

    fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
        Ideal::parse(r, gens).unwrap()
    }

    fn basis_strings(i: &Ideal) -> Vec<String> {
        i.reduced_basis().unwrap().elements.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn reduced_basis_examples() {
        let r = Ring::affine(2);
        assert_eq!(basis_strings(&ideal(&r, &["x1^2", "x1"])), vec!["x1"]);
        assert_eq!(basis_strings(&ideal(&r, &["x1 + x2", "x1 - x2"])), vec!["x2", "x1"]);
        assert_eq!(basis_strings(&ideal(&r, &["2"])), vec!["1"]);
        for i in [ideal(&r, &["x1^2", "x1"]), ideal(&r, &["x1 + x2", "x1 - x2"]), ideal(&r, &["x1^2*x2 - 1", "x1*x2^2 - x1"])] {
            assert!(i.reduced_basis().unwrap().certify_equivalence(i.generators()));
        }
    }

    #[test]
    fn normal_form_examples() {
        let r = Ring::affine(2);
        let i = ideal(&r, &["x1"]);
        let (rem, cert) = i.normal_form(&r.parse("x1^2").unwrap()).unwrap();
        assert!(rem.is_zero());
        assert!(cert.verify(i.generators()));
        let (rem, cert) = i.normal_form(&r.parse("x1 + 1").unwrap()).unwrap();
        assert_eq!(rem, r.one());
        assert!(cert.verify(i.generators()));

        let i = ideal(&r, &["x1^2 - x2"]);
        let p = &r.var(1) * &r.parse("x1^2 - x2").unwrap();
        let (rem, cert) = i.normal_form(&p).unwrap();
        assert!(rem.is_zero());
        assert_eq!(cert.cofactors, vec![(0, r.var(1))]);
    }

    #[test]
    fn unit_ideal_examples() {
        let r = Ring::affine(2);
        let i = ideal(&r, &["x1", "1 + x1"]);
        let cert = i.is_unit_ideal().unwrap().unwrap();
        assert!(cert.verify(i.generators()));
        assert!(ideal(&r, &["x1^2 - x2"]).is_unit_ideal().unwrap().is_none());
        let i = ideal(&r, &["x1", "x2 - 1", "x1 + x2"]);
        let cert = i.is_unit_ideal().unwrap().unwrap();
        assert!(cert.verify(i.generators()));
        assert!(cert.target.is_one());
    }

    #[test]
    fn membership_examples() {
        let r = Ring::affine(2);
        let i = ideal(&r, &["x1"]);
        let cert = i.membership(&r.parse("x1^3").unwrap()).unwrap().unwrap();
        assert_eq!(cert.cofactors, vec![(0, r.parse("x1^2").unwrap())]);
        assert!(i.membership(&r.var(1)).unwrap().is_none());
    }

    #[test]
    fn membership_cross_checked_on_parabola() {
        // V(x1^2 - x2, x1*x2) is the origin only; 2*x1 vanishes there but the
        // ideal is not radical, so ideal membership is the stricter question.
        let r = Ring::affine(2);
        let i = ideal(&r, &["x1^2 - x2", "x1*x2"]);
        let p = r.parse("2*x1").unwrap();
        let verdict = i.membership(&p).unwrap();
        assert!(verdict.is_none());
        // x1^3 = x1*(x1^2 - x2) + x1*x2 is a member and must vanish on the curve (a, a^2)
        // wherever x1*x2 does, i.e. at a = 0.
        let cube = r.parse("x1^3").unwrap();
        let cert = i.membership(&cube).unwrap().unwrap();
        assert!(cert.verify(i.generators()));
        let curve = ideal(&r, &["x1^2 - x2"]);
        for a in -10..10 {
            let pt = [rat(a), rat(a * a)];
            assert_eq!(curve.generators()[0].eval(&pt), rat(0));
        }
        assert!(curve.membership(&p).unwrap().is_none());
        assert!(p.eval(&[rat(1), rat(1)]) != rat(0));
    }

    #[test]
    fn ideal_equality() {
        let r = Ring::affine(2);
        assert!(ideal_equal(&ideal(&r, &["x1"]), &ideal(&r, &["x1", "x1^2"])).unwrap());
        assert!(!ideal_equal(&ideal(&r, &["x1"]), &ideal(&r, &["x1^2"])).unwrap());
    }

    #[test]
    fn budget_fails_loudly() {
        let r = Ring::affine(3);
        let i = ideal(&r, &["x1 + x2 + x3", "x1*x2 + x2*x3 + x1*x3", "x1*x2*x3 - 1"])
            .with_budget(Budget { max_pairs: 1, max_degree: 40 });
        assert!(matches!(i.reduced_basis(), Err(GroebnerError::Resource(_))));
        let i = ideal(&r, &["x1^5"]).with_budget(Budget { max_pairs: 10, max_degree: 3 });
        assert!(matches!(i.reduced_basis(), Err(GroebnerError::Resource(_))));
    }
}
