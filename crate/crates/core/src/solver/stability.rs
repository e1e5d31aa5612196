//! Perturbation of a unit decomposition `a·f = 1`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::SolverError;
use crate::grid::{vector_sup_norm, GridSpec};
use crate::groebner::{degree_bounded_linear_solve, monomials_up_to, Ideal, LinearConstraint};
use crate::linalg::{nullspace, solve, Matrix};
use crate::ring::{Poly, Rational};

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub f: Vec<Poly>,
    pub a: Vec<Poly>,
    pub f_tilde: Vec<Poly>,
    /// First solution of `a′·f̃ = 1` found at the degree bound.
    pub a_prime: Vec<Poly>,
    pub syzygies: usize,
    pub a_tilde: Vec<Poly>,
    pub grid: GridSpec,
    pub degree: u32,
    pub norm_a: Rational,
    pub norm_df: Rational,
    pub norm_da: Rational,
    /// `1 / (2|a|_K)`.
    pub delta: Rational,
    /// `4|a|_K^2 |f − f̃|_K`.
    pub bound: Rational,
    pub within_delta: bool,
    pub bound_holds: bool,
    /// `ã·f̃ = 1` re-expanded exactly.
    pub exact: bool,
}

fn dot(a: &[Poly], b: &[Poly]) -> Poly {
    let ring = a[0].ring();
    a.iter().zip(b).fold(ring.zero(), |acc, (x, y)| &acc + &(x * y))
}

/// Basis of `{v : v·f = 0}` with components of degree at most `degree`.
pub fn syzygy_basis(f: &[Poly], degree: u32) -> Vec<Vec<Poly>> {
    let ring = f[0].ring();
    let monos = monomials_up_to(ring, &ring.space_indices(), degree);
    let columns: Vec<(usize, &Vec<u32>)> = (0..f.len()).flat_map(|i| monos.iter().map(move |m| (i, m))).collect();
    let mut rows: BTreeMap<Vec<u32>, Vec<Rational>> = BTreeMap::new();
    for (c, (i, m)) in columns.iter().enumerate() {
        for (e, v) in f[*i].mul_term(&Rational::one(), m).terms() {
            rows.entry(e.clone()).or_insert_with(|| vec![Rational::zero(); columns.len()])[c] = v.clone();
        }
    }
    if rows.is_empty() {
        return Vec::new();
    }
    let a = Matrix::from_rows(rows.into_values().collect());
    nullspace(&a)
        .into_iter()
        .map(|v| {
            let mut comps: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); f.len()];
            for ((i, m), x) in columns.iter().zip(v) {
                if !x.is_zero() {
                    comps[*i].push(((*m).clone(), x));
                }
            }
            comps.into_iter().map(|t| ring.from_terms(t)).collect()
        })
        .collect()
}

/// Builds `ã` with `ã·f̃ = 1` close to `a` and reports the bound
/// `|ã − a|_K < 4|a|_K^2 |f − f̃|_K` on the grid.
pub fn stability_report(
    f: &[Poly],
    a: &[Poly],
    f_tilde: &[Poly],
    grid: &GridSpec,
    degree: u32,
) -> Result<StabilityReport, SolverError> {
    if f.is_empty() || f.len() != a.len() || f.len() != f_tilde.len() {
        return Err(SolverError::Precondition("f, a and f̃ must have the same positive length".into()));
    }
    let ring = f[0].ring();
    if !dot(a, f).is_one() {
        return Err(SolverError::Precondition("a·f is not 1".into()));
    }
    let ft_ideal = Ideal::new(ring, f_tilde.to_vec())?;
    if ft_ideal.is_unit_ideal()?.is_none() {
        return Err(SolverError::Precondition("f̃ has a common zero".into()));
    }
    let zero = Ideal::zero(ring);
    let constraint = LinearConstraint {
        terms: f_tilde.iter().cloned().enumerate().collect(),
        target: ring.one(),
        modulus: &zero,
    };
    let a_prime = degree_bounded_linear_solve(ring, f.len(), &[constraint], degree, &ring.space_indices())?
        .ok_or(SolverError::NoUnitDecompositionAtDegree(degree))?;
    let syz = syzygy_basis(f_tilde, degree);

    // Least squares toward a_0 = a / (a·f̃) at grid points where a·f̃ ≠ 0.
    let af = dot(a, f_tilde);
    let m = syz.len();
    let mut gram = vec![vec![Rational::zero(); m]; m];
    let mut rhs = vec![Rational::zero(); m];
    let probe = a.iter().chain(f_tilde).chain(syz.iter().flatten()).fold(ring.zero(), |acc, p| &acc + p);
    for x in grid.ring_points(&probe)? {
        let w = af.eval(&x);
        if w.is_zero() {
            continue;
        }
        let target: Vec<Rational> = a.iter().zip(&a_prime).map(|(ai, ap)| ai.eval(&x) / &w - ap.eval(&x)).collect();
        let zs: Vec<Vec<Rational>> = syz.iter().map(|z| z.iter().map(|p| p.eval(&x)).collect()).collect();
        for l in 0..m {
            for i in 0..f.len() {
                rhs[l] += &zs[l][i] * &target[i];
                for k in 0..m {
                    let v = &zs[l][i] * &zs[k][i];
                    gram[l][k] += v;
                }
            }
        }
    }
    let coeffs = if m == 0 {
        Vec::new()
    } else {
        solve(&Matrix::from_rows(gram), &rhs).expect("normal equations are consistent")
    };
    let a_tilde: Vec<Poly> = (0..f.len())
        .map(|i| {
            syz.iter().zip(&coeffs).fold(a_prime[i].clone(), |acc, (z, c)| &acc + &z[i].scale(c))
        })
        .collect();
    let exact = dot(&a_tilde, f_tilde).is_one();

    let diff = |x: &[Poly], y: &[Poly]| -> Vec<Poly> { x.iter().zip(y).map(|(p, q)| p - q).collect() };
    let norm_a = vector_sup_norm(a, grid)?;
    let norm_df = vector_sup_norm(&diff(f, f_tilde), grid)?;
    let norm_da = vector_sup_norm(&diff(&a_tilde, a), grid)?;
    let four = Rational::from_integer(4.into());
    let bound = &four * &norm_a * &norm_a * &norm_df;
    let delta = if norm_a.is_zero() { Rational::zero() } else { (&norm_a * Rational::from_integer(2.into())).recip() };
    Ok(StabilityReport {
        f: f.to_vec(),
        a: a.to_vec(),
        f_tilde: f_tilde.to_vec(),
        a_prime,
        syzygies: m,
        bound_holds: norm_da < bound || (norm_da.is_zero() && norm_df.is_zero()),
        within_delta: norm_df < delta,
        a_tilde,
        grid: grid.clone(),
        degree,
        norm_a,
        norm_df,
        norm_da,
        delta,
        bound,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, ratio, Ring};

    fn polys(r: &Ring, s: &[&str]) -> Vec<Poly> {
        s.iter().map(|t| r.parse(t).unwrap()).collect()
    }

    #[test]
    fn syzygies_annihilate() {
        let r = Ring::affine(1);
        let f = polys(&r, &["x1", "1 - x1"]);
        let syz = syzygy_basis(&f, 1);
        assert!(!syz.is_empty());
        for z in syz {
            assert!(dot(&z, &f).is_zero());
        }
    }

    #[test]
    fn unperturbed_is_trivial() {
        let r = Ring::affine(1);
        let f = polys(&r, &["x1", "1 - x1"]);
        let a = polys(&r, &["1", "1"]);
        let rep = stability_report(&f, &a, &f, &GridSpec::unit(1, 9).unwrap(), 1).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.a_tilde, a);
        assert_eq!(rep.norm_da, rat(0));
        assert!(rep.bound_holds);
    }

    #[test]
    fn shifted_fixture() {
        let r = Ring::affine(1);
        let f = polys(&r, &["x1", "1 - x1"]);
        let a = polys(&r, &["1", "1"]);
        let ft = polys(&r, &["x1 + 1/100", "1 - x1"]);
        let rep = stability_report(&f, &a, &ft, &GridSpec::unit(1, 9).unwrap(), 1).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.a_tilde, vec![r.constant(ratio(100, 101)); 2]);
        assert_eq!(rep.norm_da, ratio(2, 101));
        assert_eq!(rep.bound, ratio(16, 100));
        assert!(rep.bound_holds);
    }

    #[test]
    fn common_zero_rejected() {
        let r = Ring::affine(1);
        let f = polys(&r, &["x1", "1 - x1"]);
        let a = polys(&r, &["1", "1"]);
        let ft = polys(&r, &["x1", "x1^2"]);
        let err = stability_report(&f, &a, &ft, &GridSpec::unit(1, 9).unwrap(), 1).unwrap_err();
        assert!(matches!(err, SolverError::Precondition(_)));
    }
}
