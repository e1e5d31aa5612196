//! Certified solutions of `L f = g` on `Σ`.
//!
//! A unit certificate `1 = Σ a_j^k L^k f_j + Σ b_m h_m` with `f_j ∈ J(Σ)`
//! is turned into an explicit `f` by integration by parts:
//!
//! `F_{j,k} = Σ_{r<k} (−1)^r L^r(g a_j^k) L^{k−1−r} f_j`
//!
//! satisfies `L F_{j,k} = g a_j^k L^k f_j + (−1)^{k+1} L^k(g a_j^k) f_j`, so
//! `f = Σ F_{j,k}` solves the equation modulo `(f_j) ⊆ J(Σ)`.

mod stability;

use num_traits::Zero;
use thiserror::Error;

use crate::geometry::{contract, FieldOnSigma, FormTuple, GeometryError, VectorField};
use crate::grid::{sup_norm, GridError, GridSpec};
use crate::groebner::{degree_bounded_preimage, GroebnerError, Ideal, MembershipCertificate};
use crate::ring::{Poly, Rational, RingError, VarKind};
use crate::semitrans::TangencyCertificate;

pub use crate::grid::sup_norm as grid_sup_norm;
pub use stability::{stability_report, syzygy_basis, StabilityReport};

#[derive(Debug, Error, Clone)]
pub enum SolverError {
    #[error("internal consistency failure: residual not in the ideal of the locus")]
    ResidualNotInIdeal,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no unit decomposition with coefficients of degree at most {0}")]
    NoUnitDecompositionAtDegree(u32),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Partition of a unit certificate into Lie-derivative and slack parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutData {
    /// `a[j][k-1]` multiplies `L^k f_j`.
    pub a: Vec<Vec<Poly>>,
    /// `b[m]` multiplies the `m`-th generator of `J(Σ)`.
    pub b: Vec<Poly>,
}

impl BezoutData {
    /// Re-expands `Σ a_j^k L^k f_j + Σ b_m h_m` and compares with 1.
    pub fn verify(&self, l: &VectorField, functions: &[Poly], sigma_gens: &[Poly]) -> bool {
        let ring = l.ring();
        let mut acc = ring.zero();
        for (row, f) in self.a.iter().zip(functions) {
            let mut d = f.clone();
            for a in row {
                d = l.lie(&d);
                acc = &acc + &(a * &d);
            }
        }
        for (b, h) in self.b.iter().zip(sigma_gens) {
            acc = &acc + &(b * h);
        }
        self.a.len() == functions.len() && self.b.len() == sigma_gens.len() && acc.is_one()
    }

    pub fn order(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }
}

/// Reads the coefficients of the Bezout identity off the unit certificate.
pub fn bezout_lift(cert: &TangencyCertificate) -> BezoutData {
    let ring = cert.unit.target.ring();
    let mut a = vec![vec![ring.zero(); cert.order]; cert.functions.len()];
    let mut b = vec![ring.zero(); cert.sigma_len];
    for (idx, c) in &cert.unit.cofactors {
        if *idx < cert.sigma_len {
            b[*idx] = &b[*idx] + c;
        } else {
            let rel = idx - cert.sigma_len;
            let (k, j) = (rel / cert.functions.len() + 1, rel % cert.functions.len());
            a[j][k - 1] = &a[j][k - 1] + c;
        }
    }
    BezoutData { a, b }
}

/// `f` together with a certificate for `L f − g ∈ J(Σ)`.
#[derive(Debug, Clone)]
pub struct RestrictedSolution {
    pub f: Poly,
    pub g: Poly,
    /// Target `L f − g`, cofactors over the generators of `J(Σ)`.
    pub residual: MembershipCertificate,
}

impl RestrictedSolution {
    pub fn verify(&self, l: &VectorField, sigma_gens: &[Poly]) -> bool {
        self.residual.target == &l.lie(&self.f) - &self.g && self.residual.verify(sigma_gens)
    }
}

/// The integration-by-parts formula for `L f ≡ Σ g a_j^k L^k f_j`.
pub fn formula(l: &VectorField, g: &Poly, a: &[Vec<Poly>], functions: &[Poly]) -> Poly {
    let ring = l.ring();
    let mut f = ring.zero();
    for (row, fj) in a.iter().zip(functions) {
        let max_k = row.len();
        let mut powers = vec![fj.clone()];
        for _ in 1..max_k {
            let next = l.lie(powers.last().unwrap());
            powers.push(next);
        }
        for (k, ajk) in row.iter().enumerate().map(|(i, a)| (i + 1, a)) {
            if ajk.is_zero() {
                continue;
            }
            let mut c = g * ajk;
            for r in 0..k {
                let term = &c * &powers[k - 1 - r];
                f = if r % 2 == 0 { &f + &term } else { &f - &term };
                c = l.lie(&c);
            }
        }
    }
    f
}

/// Cofactors `c_j` with `L(formula) − Σ g a_j^k L^k f_j = Σ_j c_j f_j`:
/// `c_j = Σ_k (−1)^{k+1} L^k(g a_j^k)`.
pub fn telescoping_cofactors(l: &VectorField, g: &Poly, a: &[Vec<Poly>]) -> Vec<Poly> {
    let ring = l.ring();
    a.iter()
        .map(|row| {
            let mut acc = ring.zero();
            for (k, ajk) in row.iter().enumerate().map(|(i, a)| (i + 1, a)) {
                let d = l.iterated_lie(&(g * ajk), k);
                acc = if k % 2 == 1 { &acc + &d } else { &acc - &d };
            }
            acc
        })
        .collect()
}

/// Solves `L f ≡ g (mod J(Σ))` with `f` from the formula and an explicit
/// residual certificate over the generators of `Σ`.
pub fn solve_restricted(
    l: &VectorField,
    sigma: &Ideal,
    g: &Poly,
    cert: &TangencyCertificate,
    bez: &BezoutData,
) -> Result<RestrictedSolution, SolverError> {
    let gens = sigma.generators();
    if cert.sigma_len != gens.len() || bez.b.len() != gens.len() || bez.a.len() != cert.functions.len() {
        return Err(SolverError::Precondition("certificate does not match the locus".into()));
    }
    let f = formula(l, g, &bez.a, &cert.functions);
    let c = telescoping_cofactors(l, g, &bez.a);
    let mut dense: Vec<Poly> = bez.b.iter().map(|b| -&(g * b)).collect();
    for (cj, membership) in c.iter().zip(&cert.memberships) {
        if cj.is_zero() {
            continue;
        }
        for (m, e) in &membership.cofactors {
            dense[*m] = &dense[*m] + &(cj * e);
        }
    }
    let target = &l.lie(&f) - g;
    let residual = MembershipCertificate {
        target,
        cofactors: dense.into_iter().enumerate().filter(|(_, p)| !p.is_zero()).collect(),
    };
    if !residual.verify(gens) {
        return Err(SolverError::ResidualNotInIdeal);
    }
    Ok(RestrictedSolution { f, g: g.clone(), residual })
}

/// Same construction over a ring with parameter variables; the field
/// has no parameter components by construction.
pub fn solve_restricted_parametric(
    l: &VectorField,
    sigma: &Ideal,
    g: &Poly,
    cert: &TangencyCertificate,
    bez: &BezoutData,
) -> Result<RestrictedSolution, SolverError> {
    if l.ring().indices_of_kind(VarKind::Parameter).is_empty() {
        return Err(SolverError::Precondition("ring has no parameter variables".into()));
    }
    solve_restricted(l, sigma, g, cert, bez)
}

/// Solves `L f ≡ g` modulo `J(Σ)` directly with `deg f ≤ degree`, without a
/// tangency certificate.
pub fn solve_restricted_direct(
    l: &VectorField,
    sigma: &Ideal,
    g: &Poly,
    degree: u32,
) -> Result<Option<RestrictedSolution>, SolverError> {
    let ring = l.ring();
    let mut vars = ring.space_indices();
    vars.extend(ring.indices_of_kind(VarKind::Parameter));
    let Some(f) = degree_bounded_preimage(ring, |p| l.lie(p), g, sigma, degree, &vars)? else {
        return Ok(None);
    };
    let target = &l.lie(&f) - g;
    let residual = sigma.membership(&target)?.ok_or(SolverError::ResidualNotInIdeal)?;
    Ok(Some(RestrictedSolution { f, g: g.clone(), residual }))
}

/// A parametric solution and its certificate at `name = value`.
pub fn specialize_solution(
    sol: &RestrictedSolution,
    sigma_gens: &[Poly],
    name: &str,
    value: &Rational,
) -> Result<(RestrictedSolution, Vec<Poly>), SolverError> {
    let spec = |p: &Poly| p.specialize(name, value);
    let gens = sigma_gens.iter().map(spec).collect::<Result<Vec<_>, _>>()?;
    let residual = MembershipCertificate {
        target: spec(&sol.residual.target)?,
        cofactors: sol.residual.cofactors.iter().map(|(i, c)| Ok((*i, spec(c)?))).collect::<Result<_, RingError>>()?,
    };
    Ok((RestrictedSolution { f: spec(&sol.f)?, g: spec(&sol.g)?, residual }, gens))
}

/// `f_k = g_k + h` with `L f_k ≡ 1` on `Σ`.
#[derive(Debug, Clone)]
pub struct Step22Solution {
    pub g_k: Poly,
    /// Solution of `L h ≡ 1 − L g_k`.
    pub h: RestrictedSolution,
    pub f_k: Poly,
    /// Target `L f_k − 1` over the generators of `J(Σ)`.
    pub residual: MembershipCertificate,
    pub norm_h: Rational,
    pub norm_target: Rational,
}

impl Step22Solution {
    /// Observed `|h|_K / |1 − L g_k|_K`, undefined when the target vanishes on the grid.
    pub fn ratio(&self) -> Option<Rational> {
        (!self.norm_target.is_zero()).then(|| &self.norm_h / &self.norm_target)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_step_2_2(
    forms: &FormTuple,
    k: usize,
    sigma: &Ideal,
    field: &FieldOnSigma,
    g_k: &Poly,
    cert: &TangencyCertificate,
    bez: &BezoutData,
    grid: &GridSpec,
) -> Result<Step22Solution, SolverError> {
    let l = &field.field;
    let ring = forms.ring();
    let pairing = &contract(forms.row(k)?, l) - &ring.one();
    match field.certificates.get(k) {
        Some(c) if c.target == pairing && c.verify(sigma.generators()) => {}
        _ => return Err(SolverError::Precondition("the field is not certified to pair to 1 with the form".into())),
    }
    let target = &ring.one() - &l.lie(g_k);
    let h = solve_restricted(l, sigma, &target, cert, bez)?;
    finish_step(g_k, h, grid)
}

/// `f_k` when `1 − L g_k` already lies in `J(Σ)`: `h = 0`.
pub fn solve_step_2_2_exact(
    sigma: &Ideal,
    l: &VectorField,
    g_k: &Poly,
    grid: &GridSpec,
) -> Result<Option<Step22Solution>, SolverError> {
    let ring = l.ring();
    let target = &ring.one() - &l.lie(g_k);
    let Some(cert) = sigma.membership(&(-&target))? else {
        return Ok(None);
    };
    let h = RestrictedSolution { f: ring.zero(), g: target, residual: cert };
    finish_step(g_k, h, grid).map(Some)
}

/// `f_k` with `h` from [`solve_restricted_direct`].
pub fn solve_step_2_2_direct(
    sigma: &Ideal,
    l: &VectorField,
    g_k: &Poly,
    degree: u32,
    grid: &GridSpec,
) -> Result<Option<Step22Solution>, SolverError> {
    let target = &l.ring().one() - &l.lie(g_k);
    match solve_restricted_direct(l, sigma, &target, degree)? {
        Some(h) => finish_step(g_k, h, grid).map(Some),
        None => Ok(None),
    }
}

fn finish_step(g_k: &Poly, h: RestrictedSolution, grid: &GridSpec) -> Result<Step22Solution, SolverError> {
    let f_k = g_k + &h.f;
    // L f_k − 1 = L h − (1 − L g_k), the residual of h.
    let residual = h.residual.clone();
    let norm_h = sup_norm(&h.f, grid)?;
    let norm_target = sup_norm(&h.g, grid)?;
    Ok(Step22Solution { g_k: g_k.clone(), h, f_k, residual, norm_h, norm_target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{construct_field_on_sigma, sigma_without};
    use crate::ring::{rat, ratio, Ring, Variable};
    use crate::semitrans::{extract_certificate, tangency_chain};

    fn pipeline(ring: &Ring, gens: &[&str], field: &[&str]) -> (Ideal, VectorField, TangencyCertificate, BezoutData) {
        let sigma = Ideal::parse(ring, gens).unwrap();
        let l = VectorField::parse(ring, field).unwrap();
        let chain = tangency_chain(&sigma, &l, 6).unwrap();
        let cert = extract_certificate(&chain, &sigma, &l).unwrap();
        let bez = bezout_lift(&cert);
        assert!(bez.verify(&l, &cert.functions, sigma.generators()));
        (sigma, l, cert, bez)
    }

    #[test]
    fn bezout_examples() {
        let r = Ring::affine(2);
        let (_, _, _, bez) = pipeline(&r, &["x2"], &["0", "1"]);
        assert_eq!(bez.a, vec![vec![r.one()]]);
        assert!(bez.b.iter().all(Poly::is_zero));
        let (_, _, _, bez) = pipeline(&r, &["x1^2 - x2"], &["1", "0"]);
        assert_eq!(bez.a, vec![vec![r.zero(), r.constant(ratio(1, 2))]]);
        let (_, _, _, bez) = pipeline(&r, &["x1", "x2"], &["1", "1"]);
        assert_eq!(bez.a, vec![vec![r.one()]]);
    }

    #[test]
    fn solve_examples() {
        let r = Ring::affine(2);
        let (sigma, l, cert, bez) = pipeline(&r, &["x2"], &["0", "1"]);
        let s = solve_restricted(&l, &sigma, &r.one(), &cert, &bez).unwrap();
        assert_eq!(s.f, r.var(1));
        assert!(s.residual.target.is_zero());
        let s = solve_restricted(&l, &sigma, &r.var(0), &cert, &bez).unwrap();
        assert_eq!(s.f, r.parse("x1*x2").unwrap());

        let (sigma, l, cert, bez) = pipeline(&r, &["x1^2 - x2"], &["1", "0"]);
        let s = solve_restricted(&l, &sigma, &r.one(), &cert, &bez).unwrap();
        assert_eq!(s.f, r.var(0));
        assert!(s.residual.target.is_zero());
        assert!(s.verify(&l, sigma.generators()));
    }

    #[test]
    fn order_three_needs_alternating_signs() {
        // Σ = (x1^3 − x2), L = ∂/∂x1: 1 = (1/6) L^3 f.
        let r = Ring::affine(2);
        let (sigma, l, cert, bez) = pipeline(&r, &["x1^3 - x2"], &["1", "0"]);
        assert_eq!(cert.order, 3);
        let g = r.parse("x1*x2 + 1").unwrap();
        let s = solve_restricted(&l, &sigma, &g, &cert, &bez).unwrap();
        assert!(s.verify(&l, sigma.generators()));
    }

    #[test]
    fn step_2_2_examples() {
        let r = Ring::affine(2);
        let grid = GridSpec::unit(2, 9).unwrap();
        let forms = FormTuple::parse(&r, &[&["1", "0"], &["0", "x2"], &["0", "1 + x2"]]).unwrap();
        let sigma = sigma_without(&forms, 2).unwrap().ideal;
        let field = construct_field_on_sigma(&forms, 2, &sigma, 4).unwrap();
        assert_eq!(sigma.reduce(&field.field.components()[1]).unwrap(), r.one());
        let chain = tangency_chain(&sigma, &field.field, 6).unwrap();
        let cert = extract_certificate(&chain, &sigma, &field.field).unwrap();
        let bez = bezout_lift(&cert);
        for g in ["x2", "x2 + x2^2"] {
            let g = r.parse(g).unwrap();
            let s = solve_step_2_2(&forms, 2, &sigma, &field, &g, &cert, &bez, &grid).unwrap();
            assert_eq!(s.residual.target, &field.field.lie(&s.f_k) - &r.one());
            assert!(s.residual.verify(sigma.generators()));
        }
    }

    #[test]
    fn step_2_2_with_exact_primitive() {
        let r = Ring::affine(2);
        let grid = GridSpec::unit(2, 9).unwrap();
        let sigma = Ideal::parse(&r, &["x2"]).unwrap();
        let l = VectorField::coordinate(&r, 1);
        let s = solve_step_2_2_exact(&sigma, &l, &r.var(1), &grid).unwrap().unwrap();
        assert!(s.h.f.is_zero());
        assert_eq!(s.f_k, r.var(1));
        assert_eq!(s.ratio(), None);
    }

    #[test]
    fn parametric_example() {
        let r = Ring::affine(2).adjoin(&[Variable::parameter("s")]).unwrap();
        let (sigma, l, cert, bez) = pipeline(&r, &["x2 - s"], &["0", "1"]);
        let s = solve_restricted_parametric(&l, &sigma, &r.one(), &cert, &bez).unwrap();
        assert_eq!(s.f, r.parse("x2 - s").unwrap());
        for v in [rat(0), ratio(3, 7), rat(-5)] {
            let (sp, gens) = specialize_solution(&s, sigma.generators(), "s", &v).unwrap();
            let l0 = VectorField::coordinate(sp.f.ring(), 1);
            assert!(sp.verify(&l0, &gens));
        }

        let (sigma, l, cert, bez) = pipeline(&r, &["x1^2 - s*x2"], &["1", "0"]);
        assert_eq!(cert.order, 2);
        let s = solve_restricted_parametric(&l, &sigma, &r.one(), &cert, &bez).unwrap();
        assert_eq!(s.f, r.var(0));
    }
}
