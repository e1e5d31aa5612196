//! Degree-bounded linear systems over polynomial unknowns modulo ideals.
//!
//! Each unknown is written as a generic polynomial of degree at most `D`
//! in a chosen set of variables. Normal forms are linear, so every
//! constraint becomes a rational linear system on the unknown coefficients.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{GroebnerError, Ideal};
use crate::linalg::{solve, Matrix};
use crate::ring::{mono_degree, Poly, Rational, Ring};

/// `Σ coefficient · unknown[index] ≡ target (mod modulus)`.
#[derive(Debug, Clone)]
pub struct LinearConstraint<'a> {
    pub terms: Vec<(usize, Poly)>,
    pub target: Poly,
    pub modulus: &'a Ideal,
}

/// Exponent vectors of degree ≤ `degree` supported on `vars`, ascending by
/// degree and by term order within a degree.
pub fn monomials_up_to(ring: &Ring, vars: &[usize], degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; ring.nvars()]];
    let mut frontier = out.clone();
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &frontier {
            // Only raise variables at or after the last raised one to avoid duplicates.
            let last = vars.iter().rposition(|&v| m[v] > 0).unwrap_or(0);
            for &v in &vars[last..] {
                let mut e = m.clone();
                e[v] += 1;
                next.push(e);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    let order = ring.order();
    out.sort_by(|a, b| mono_degree(a).cmp(&mono_degree(b)).then_with(|| order.cmp(a, b)));
    out
}

/// Unknown polynomials of degree ≤ `degree` in `vars` satisfying every
/// constraint, or `None` when the ansatz admits no solution. Among
/// solutions, free coefficients are zero, favouring low-degree monomials.
pub fn degree_bounded_linear_solve(
    ring: &Ring,
    unknowns: usize,
    constraints: &[LinearConstraint<'_>],
    degree: u32,
    vars: &[usize],
) -> Result<Option<Vec<Poly>>, GroebnerError> {
    let monos = monomials_up_to(ring, vars, degree);
    let columns: Vec<(usize, &Vec<u32>)> =
        monos.iter().flat_map(|m| (0..unknowns).map(move |u| (u, m))).collect();

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for c in constraints {
        let mut images: Vec<BTreeMap<Vec<u32>, Rational>> = vec![BTreeMap::new(); columns.len()];
        for (col, (u, m)) in columns.iter().enumerate() {
            let mut image = ring.zero();
            for (idx, coef) in &c.terms {
                if idx == u && !coef.is_zero() {
                    image = &image + &coef.mul_term(&Rational::from_integer(1.into()), m);
                }
            }
            if !image.is_zero() {
                images[col] = c.modulus.reduce(&image)?.terms().iter().cloned().collect();
            }
        }
        let target: BTreeMap<Vec<u32>, Rational> = c.modulus.reduce(&c.target)?.terms().iter().cloned().collect();
        let mut keys: Vec<&Vec<u32>> = images.iter().flat_map(|m| m.keys()).chain(target.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            rows.push(images.iter().map(|m| m.get(k).cloned().unwrap_or_else(Rational::zero)).collect());
            rhs.push(target.get(k).cloned().unwrap_or_else(Rational::zero));
        }
    }

    let solution = if rows.is_empty() {
        vec![Rational::zero(); columns.len()]
    } else {
        let a = Matrix::from_rows(rows);
        match solve(&a, &rhs) {
            Some(x) => x,
            None => return Ok(None),
        }
    };
    let mut terms: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); unknowns];
    for ((u, m), v) in columns.iter().zip(solution) {
        if !v.is_zero() {
            terms[*u].push(((*m).clone(), v));
        }
    }
    Ok(Some(terms.into_iter().map(|t| ring.from_terms(t)).collect()))
}

/// A polynomial `h` of degree ≤ `degree` in `vars` with `op(h) ≡ target`
/// modulo `modulus`, for a linear map `op`; free coefficients are zero.
pub fn degree_bounded_preimage(
    ring: &Ring,
    op: impl Fn(&Poly) -> Poly,
    target: &Poly,
    modulus: &Ideal,
    degree: u32,
    vars: &[usize],
) -> Result<Option<Poly>, GroebnerError> {
    let monos = monomials_up_to(ring, vars, degree);
    let mut images: Vec<BTreeMap<Vec<u32>, Rational>> = Vec::with_capacity(monos.len());
    for m in &monos {
        let image = op(&ring.term(Rational::from_integer(1.into()), m.clone()));
        images.push(modulus.reduce(&image)?.terms().iter().cloned().collect());
    }
    let t: BTreeMap<Vec<u32>, Rational> = modulus.reduce(target)?.terms().iter().cloned().collect();
    let mut keys: Vec<&Vec<u32>> = images.iter().flat_map(|m| m.keys()).chain(t.keys()).collect();
    keys.sort();
    keys.dedup();
    if keys.is_empty() {
        return Ok(Some(ring.zero()));
    }
    let rows: Vec<Vec<Rational>> =
        keys.iter().map(|k| images.iter().map(|m| m.get(*k).cloned().unwrap_or_else(Rational::zero)).collect()).collect();
    let rhs: Vec<Rational> = keys.iter().map(|k| t.get(*k).cloned().unwrap_or_else(Rational::zero)).collect();
    Ok(solve(&Matrix::from_rows(rows), &rhs).map(|x| ring.from_terms(monos.into_iter().zip(x).filter(|(_, v)| !v.is_zero()))))
}
