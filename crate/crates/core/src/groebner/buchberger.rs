//! Buchberger's algorithm with cofactor tracking.
//!
//! Every polynomial created during the run is logged as a combination of
//! earlier ones. Cofactors over the input generators are expanded from the
//! log only when a certificate is asked for.

use num_traits::One;

use super::{Budget, GroebnerError};
use crate::ring::{mono_coprime, mono_degree, mono_div, mono_divides, mono_lcm, Poly, Rational, Ring};

/// How a logged polynomial arises.
#[derive(Debug, Clone)]
enum Node {
    /// `scale · gens[index]`.
    Generator { index: usize, scale: Rational },
    /// `Σ coefficient · node`, over earlier nodes only.
    Derived(Vec<(Poly, usize)>),
}

/// Derivation log of a Buchberger run.
#[derive(Debug, Clone, Default)]
pub(crate) struct Trace {
    nodes: Vec<Node>,
}

impl Trace {
    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Dense cofactors over the `width` generators of `Σ coefficient · node`.
    pub(crate) fn expand(&self, ring: &Ring, combination: &[(Poly, usize)], width: usize) -> Vec<Poly> {
        let mut acc: Vec<Poly> = vec![ring.zero(); self.nodes.len()];
        for (c, k) in combination {
            if !c.is_zero() {
                acc[*k] = &acc[*k] + c;
            }
        }
        let mut out = vec![ring.zero(); width];
        for k in (0..self.nodes.len()).rev() {
            if acc[k].is_zero() {
                continue;
            }
            let a = std::mem::replace(&mut acc[k], ring.zero());
            match &self.nodes[k] {
                Node::Generator { index, scale } => out[*index] = &out[*index] + &a.scale(scale),
                Node::Derived(terms) => {
                    for (c, m) in terms {
                        acc[*m] = &acc[*m] + &(&a * c);
                    }
                }
            }
        }
        out
    }
}

/// Basis element and its node in the trace.
#[derive(Debug, Clone)]
pub(crate) struct Tracked {
    pub poly: Poly,
    pub node: usize,
}

/// Full reduction of `p` by monic polynomials. Returns the remainder and one
/// quotient per divisor, so that `p = Σ q_i · divisors[i] + remainder`.
pub(crate) fn reduce(p: &Poly, divisors: &[&Poly]) -> (Poly, Vec<Poly>) {
    let ring = p.ring().clone();
    let mut work = p.clone();
    let mut rem: Vec<(Vec<u32>, Rational)> = Vec::new();
    let mut quot: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); divisors.len()];
    let lms: Vec<&[u32]> = divisors.iter().map(|g| g.leading_monomial().expect("nonzero divisor")).collect();
    while let Some(lm) = work.leading_monomial() {
        match lms.iter().position(|d| mono_divides(d, lm)) {
            Some(i) => {
                let c = work.leading_coefficient().unwrap().clone();
                let m = mono_div(lm, lms[i]);
                work.sub_mul_term(&c, &m, divisors[i]);
                quot[i].push((m, c));
            }
            None => rem.push(work.pop_leading().unwrap()),
        }
    }
    let quotients = quot.into_iter().map(|t| ring.from_terms(t)).collect();
    (Poly::from_sorted_terms(&ring, rem), quotients)
}

/// Scales `poly` to leading coefficient 1, logging the scaled polynomial.
fn make_monic(poly: Poly, terms: Vec<(Poly, usize)>, trace: &mut Trace) -> Tracked {
    let inv = poly.leading_coefficient().expect("nonzero").recip();
    let node = if inv.is_one() {
        trace.push(Node::Derived(terms))
    } else {
        trace.push(Node::Derived(terms.into_iter().map(|(c, k)| (c.scale(&inv), k)).collect()))
    };
    Tracked { poly: poly.scale(&inv), node }
}

/// Counters reported alongside a basis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroebnerStats {
    pub pairs_considered: usize,
    pub pairs_reduced: usize,
    pub max_degree_seen: u32,
}

pub(crate) fn compute(
    ring: &Ring,
    gens: &[Poly],
    budget: &Budget,
) -> Result<(Vec<Tracked>, Trace, GroebnerStats), GroebnerError> {
    let mut trace = Trace::default();
    let mut stats = GroebnerStats::default();
    let mut basis: Vec<Tracked> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let scale = g.leading_coefficient().expect("nonzero").recip();
        let node = trace.push(Node::Generator { index: j, scale: scale.clone() });
        let t = Tracked { poly: g.scale(&scale), node };
        stats.max_degree_seen = stats.max_degree_seen.max(t.poly.degree().unwrap_or(0));
        if t.poly.is_constant() {
            return Ok((vec![t], trace, stats));
        }
        basis.push(t);
    }
    if stats.max_degree_seen > budget.max_degree {
        return Err(GroebnerError::Resource(format!(
            "input degree {} exceeds budget {}",
            stats.max_degree_seen, budget.max_degree
        )));
    }

    let mut pending: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.push((i, j));
        }
    }

    let lcm_of = |b: &[Tracked], i: usize, j: usize| {
        mono_lcm(b[i].poly.leading_monomial().unwrap(), b[j].poly.leading_monomial().unwrap())
    };

    while !pending.is_empty() {
        // Normal selection strategy: smallest lcm first, ties by insertion.
        let order = ring.order();
        let mut best = 0;
        let mut best_lcm = lcm_of(&basis, pending[0].0, pending[0].1);
        for (idx, &(i, j)) in pending.iter().enumerate().skip(1) {
            let l = lcm_of(&basis, i, j);
            if order.cmp(&l, &best_lcm) == std::cmp::Ordering::Less {
                best = idx;
                best_lcm = l;
            }
        }
        let (i, j) = pending.swap_remove(best);
        let lcm = best_lcm;
        stats.pairs_considered += 1;

        let lm_i = basis[i].poly.leading_monomial().unwrap().to_vec();
        let lm_j = basis[j].poly.leading_monomial().unwrap().to_vec();
        if mono_coprime(&lm_i, &lm_j) {
            continue;
        }
        let is_pending = |a: usize, b: usize| {
            let key = (a.min(b), a.max(b));
            pending.contains(&key)
        };
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && mono_divides(basis[k].poly.leading_monomial().unwrap(), &lcm)
                && !is_pending(i, k)
                && !is_pending(j, k)
        });
        if chain {
            continue;
        }

        stats.pairs_reduced += 1;
        if stats.pairs_reduced > budget.max_pairs {
            return Err(GroebnerError::Resource(format!("S-pair budget {} exhausted", budget.max_pairs)));
        }
        let lcm_deg = mono_degree(&lcm);
        stats.max_degree_seen = stats.max_degree_seen.max(lcm_deg);
        if lcm_deg > budget.max_degree {
            return Err(GroebnerError::Resource(format!(
                "S-pair degree {lcm_deg} exceeds budget {}",
                budget.max_degree
            )));
        }

        let one = Rational::one();
        let mi = ring.term(one.clone(), mono_div(&lcm, &lm_i));
        let mj = ring.term(one, mono_div(&lcm, &lm_j));
        let s = &(&mi * &basis[i].poly) - &(&mj * &basis[j].poly);
        let divisors: Vec<&Poly> = basis.iter().map(|t| &t.poly).collect();
        let (r, quotients) = reduce(&s, &divisors);
        if r.is_zero() {
            continue;
        }
        let mut terms = vec![(mi, basis[i].node), (-&mj, basis[j].node)];
        for (l, q) in quotients.iter().enumerate() {
            if !q.is_zero() {
                terms.push((-q, basis[l].node));
            }
        }
        let t = make_monic(r, terms, &mut trace);
        if t.poly.is_constant() {
            return Ok((vec![t], trace, stats));
        }
        let d = t.poly.degree().unwrap();
        stats.max_degree_seen = stats.max_degree_seen.max(d);
        if d > budget.max_degree {
            return Err(GroebnerError::Resource(format!("basis degree {d} exceeds budget {}", budget.max_degree)));
        }
        let new = basis.len();
        basis.push(t);
        for l in 0..new {
            pending.push((l, new));
        }
    }

    let reduced = interreduce(basis, &mut trace);
    Ok((reduced, trace, stats))
}

/// Turns a Gröbner basis into the reduced one, keeping cofactors.
fn interreduce(basis: Vec<Tracked>, trace: &mut Trace) -> Vec<Tracked> {
    let mut keep: Vec<Tracked> = Vec::new();
    for (i, t) in basis.iter().enumerate() {
        let lm = t.poly.leading_monomial().unwrap();
        let redundant = basis.iter().enumerate().any(|(k, u)| {
            let lk = u.poly.leading_monomial().unwrap();
            k != i && mono_divides(lk, lm) && (lk != lm || k < i)
        });
        if !redundant {
            keep.push(t.clone());
        }
    }
    for i in 0..keep.len() {
        let others: Vec<usize> = (0..keep.len()).filter(|&k| k != i).collect();
        let divisors: Vec<&Poly> = others.iter().map(|&k| &keep[k].poly).collect();
        let (r, quotients) = reduce(&keep[i].poly, &divisors);
        if quotients.iter().all(|q| q.is_zero()) {
            continue;
        }
        let mut terms = vec![(r.ring().one(), keep[i].node)];
        for (q, &k) in quotients.iter().zip(&others) {
            if !q.is_zero() {
                terms.push((-q, keep[k].node));
            }
        }
        let node = trace.push(Node::Derived(terms));
        keep[i] = Tracked { poly: r, node };
    }
    let order = keep.first().map(|t| t.poly.ring().order());
    if let Some(order) = order {
        keep.sort_by(|a, b| order.cmp(a.poly.leading_monomial().unwrap(), b.poly.leading_monomial().unwrap()));
    }
    keep
}
