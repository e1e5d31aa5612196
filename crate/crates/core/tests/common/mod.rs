#![allow(dead_code)]

use holcert::groebner::{monomials_up_to, Ideal};
use holcert::ring::{rat, Poly, Ring, TermOrder, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial in `vars` of degree at most `degree`; each monomial
/// is present with probability `density` and gets a coefficient in −3..=3.
pub fn random_poly(rng: &mut ChaCha8Rng, ring: &Ring, vars: &[usize], degree: u32, density: f64) -> Poly {
    let terms = monomials_up_to(ring, vars, degree)
        .into_iter()
        .filter_map(|m| rng.gen_bool(density).then(|| (m, rat(rng.gen_range(-3..=3)))));
    ring.from_terms(terms)
}

pub fn random_nonzero(rng: &mut ChaCha8Rng, ring: &Ring, vars: &[usize], degree: u32, density: f64) -> Poly {
    loop {
        let p = random_poly(rng, ring, vars, degree, density);
        if !p.is_zero() {
            return p;
        }
    }
}

/// `gcd(a, b)` from `a·b = gcd·lcm`, the lcm generating `(a) ∩ (b)`
/// by elimination of an auxiliary variable under lex.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let ring = a.ring();
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let mut vars = vec![Variable::space("aux_t")];
    vars.extend(ring.vars().iter().cloned());
    let lex = Ring::new(vars, TermOrder::Lex).unwrap();
    let t = lex.var(0);
    let (ae, be) = (a.embed(&lex).unwrap(), b.embed(&lex).unwrap());
    let ideal = Ideal::new(&lex, vec![&t * &ae, &(&lex.one() - &t) * &be]).unwrap();
    let basis = ideal.reduced_basis().unwrap();
    let lcm = basis
        .elements
        .iter()
        .filter(|p| p.degree_in(0) == 0)
        .min_by_key(|p| p.degree())
        .expect("the intersection of two principal ideals is principal")
        .clone();
    let (r, cert) = Ideal::principal(lcm).normal_form(&(&ae * &be)).unwrap();
    assert!(r.is_zero());
    let q = cert.cofactors.first().map(|(_, c)| c.clone()).unwrap_or_else(|| lex.zero());
    q.embed(ring).unwrap().monic()
}

pub fn gcd_all(ps: &[Poly]) -> Option<Poly> {
    let mut it = ps.iter().filter(|p| !p.is_zero());
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, p| gcd(&acc, p)))
}
