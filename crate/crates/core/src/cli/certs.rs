//! Serialized certificates, re-checked with polynomial arithmetic only.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::geometry::{contract, determinant, exterior_derivative, VectorField};
use crate::groebner::MembershipCertificate;
use crate::ring::{parse_rational, Poly, Ring, RingError, TermOrder, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub variables: Vec<Variable>,
    pub order: TermOrder,
}

impl RingSpec {
    pub fn of(ring: &Ring) -> Self {
        Self { variables: ring.vars().to_vec(), order: ring.order() }
    }

    pub fn build(&self) -> Result<Ring, RingError> {
        Ring::new(self.variables.clone(), self.order)
    }
}

pub type Cofactors = Vec<(usize, String)>;

pub fn strings(ps: &[Poly]) -> Vec<String> {
    ps.iter().map(Poly::to_string).collect()
}

pub fn rows_of(rows: &[Vec<Poly>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| strings(r)).collect()
}

pub fn cofactors_of(c: &MembershipCertificate) -> Cofactors {
    c.cofactors.iter().map(|(i, p)| (*i, p.to_string())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub label: String,
    pub rows: Vec<Vec<String>>,
    pub interval: (String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `target = Σ c_i · generators[i]`.
    Membership { name: String, ring: RingSpec, generators: Vec<String>, target: String, cofactors: Cofactors },
    /// `1 = Σ c_i · m_i` over the `n×n` minors of `rows`, in lexicographic order of row sets.
    Rank { name: String, ring: RingSpec, rows: Vec<Vec<String>>, cofactors: Cofactors },
    /// `contract(rows[j], L) − δ_jk` over the nonzero minors of the rows other than `k`.
    FieldPairing {
        name: String,
        ring: RingSpec,
        rows: Vec<Vec<String>>,
        k: usize,
        field: Vec<String>,
        cofactors: Vec<Cofactors>,
    },
    /// `1` over `sigma` followed by `L^i sigma[j]` for `j` in `selected`, `i = 1..=order`.
    Tangency {
        name: String,
        ring: RingSpec,
        field: Vec<String>,
        sigma: Vec<String>,
        selected: Vec<usize>,
        order: usize,
        cofactors: Cofactors,
    },
    /// `Σ a[j][i-1] L^i sigma[selected[j]] + Σ b[m] sigma[m] = 1`.
    Bezout {
        name: String,
        ring: RingSpec,
        field: Vec<String>,
        sigma: Vec<String>,
        selected: Vec<usize>,
        a: Vec<Vec<String>>,
        b: Vec<String>,
    },
    /// `L f − g` over `sigma`, also at each listed value of `parameter`.
    Solution {
        name: String,
        ring: RingSpec,
        field: Vec<String>,
        sigma: Vec<String>,
        f: String,
        g: String,
        cofactors: Cofactors,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parameter: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        specializations: Vec<String>,
    },
    /// `target = multiplier · det(delta_rows)^power`.
    Product { name: String, ring: RingSpec, target: String, multiplier: String, delta_rows: Vec<Vec<String>>, power: usize },
    /// `1` over `L^i sigma`, `i ≤ order`, and `1 − y·delta` in the ring with `y`.
    Localized {
        name: String,
        ring: RingSpec,
        localizer: Option<String>,
        field: Vec<String>,
        sigma: Vec<String>,
        delta: String,
        order: usize,
        cofactors: Cofactors,
    },
    /// `contract(row, L) − contract(original, L)` over `sigma`.
    Contraction {
        name: String,
        ring: RingSpec,
        row: Vec<String>,
        original: Vec<String>,
        field: Vec<String>,
        sigma: Vec<String>,
        cofactors: Cofactors,
    },
    /// Consecutive segments agree at their shared endpoint.
    Homotopy {
        name: String,
        ring: RingSpec,
        t: String,
        start: Vec<Vec<String>>,
        end: Vec<Vec<String>>,
        segments: Vec<SegmentSpec>,
    },
    /// `rows[k] = d functions[k]`.
    Exactness { name: String, ring: RingSpec, rows: Vec<Vec<String>>, functions: Vec<String> },
}

struct Ctx {
    ring: Ring,
}

impl Ctx {
    fn p(&self, s: &str) -> Result<Poly, RingError> {
        self.ring.parse(s)
    }

    fn ps(&self, s: &[String]) -> Result<Vec<Poly>, RingError> {
        s.iter().map(|x| self.p(x)).collect()
    }

    fn rows(&self, s: &[Vec<String>]) -> Result<Vec<Vec<Poly>>, RingError> {
        s.iter().map(|r| self.ps(r)).collect()
    }

    fn field(&self, s: &[String]) -> Option<VectorField> {
        VectorField::new(&self.ring, self.ps(s).ok()?).ok()
    }

    fn cert(&self, target: Poly, c: &Cofactors) -> Result<MembershipCertificate, RingError> {
        let cofactors = c.iter().map(|(i, s)| Ok((*i, self.p(s)?))).collect::<Result<_, RingError>>()?;
        Ok(MembershipCertificate { target, cofactors })
    }
}

fn minors(ring: &Ring, rows: &[Vec<Poly>], subset: &[usize]) -> Vec<Poly> {
    let n = ring.space_dim();
    subset
        .iter()
        .copied()
        .combinations(n)
        .map(|s| {
            let m: Vec<Vec<Poly>> = s.iter().map(|&i| rows[i].clone()).collect();
            determinant(&m, ring)
        })
        .collect()
}

fn lie_generators(l: &VectorField, sigma: &[Poly], selected: &[usize], order: usize) -> Vec<Poly> {
    let mut gens = sigma.to_vec();
    let mut cur: Vec<Poly> = selected.iter().filter_map(|&i| sigma.get(i).cloned()).collect();
    for _ in 0..order {
        cur = cur.iter().map(|p| l.lie(p)).collect();
        gens.extend(cur.iter().cloned());
    }
    gens
}

impl Certificate {
    pub fn name(&self) -> &str {
        match self {
            Certificate::Membership { name, .. }
            | Certificate::Rank { name, .. }
            | Certificate::FieldPairing { name, .. }
            | Certificate::Tangency { name, .. }
            | Certificate::Bezout { name, .. }
            | Certificate::Solution { name, .. }
            | Certificate::Product { name, .. }
            | Certificate::Localized { name, .. }
            | Certificate::Contraction { name, .. }
            | Certificate::Homotopy { name, .. }
            | Certificate::Exactness { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Membership { .. } => "membership",
            Certificate::Rank { .. } => "rank",
            Certificate::FieldPairing { .. } => "field-pairing",
            Certificate::Tangency { .. } => "tangency",
            Certificate::Bezout { .. } => "bezout",
            Certificate::Solution { .. } => "solution",
            Certificate::Product { .. } => "product",
            Certificate::Localized { .. } => "localized",
            Certificate::Contraction { .. } => "contraction",
            Certificate::Homotopy { .. } => "homotopy",
            Certificate::Exactness { .. } => "exactness",
        }
    }

    fn ring(&self) -> &RingSpec {
        match self {
            Certificate::Membership { ring, .. }
            | Certificate::Rank { ring, .. }
            | Certificate::FieldPairing { ring, .. }
            | Certificate::Tangency { ring, .. }
            | Certificate::Bezout { ring, .. }
            | Certificate::Solution { ring, .. }
            | Certificate::Product { ring, .. }
            | Certificate::Localized { ring, .. }
            | Certificate::Contraction { ring, .. }
            | Certificate::Homotopy { ring, .. }
            | Certificate::Exactness { ring, .. } => ring,
        }
    }

    /// Re-expands every identity; malformed data counts as a failure.
    pub fn verify(&self) -> bool {
        let Ok(ring) = self.ring().build() else {
            return false;
        };
        self.check(&Ctx { ring }).unwrap_or(false)
    }

    fn check(&self, c: &Ctx) -> Result<bool, RingError> {
        let ring = &c.ring;
        Ok(match self {
            Certificate::Membership { generators, target, cofactors, .. } => {
                c.cert(c.p(target)?, cofactors)?.verify(&c.ps(generators)?)
            }
            Certificate::Rank { rows, cofactors, .. } => {
                let rows = c.rows(rows)?;
                let all: Vec<usize> = (0..rows.len()).collect();
                rows.len() >= ring.space_dim() && c.cert(ring.one(), cofactors)?.verify(&minors(ring, &rows, &all))
            }
            Certificate::FieldPairing { rows, k, field, cofactors, .. } => {
                let rows = c.rows(rows)?;
                let Some(l) = c.field(field) else { return Ok(false) };
                if *k >= rows.len() || cofactors.len() != rows.len() {
                    return Ok(false);
                }
                let others: Vec<usize> = (0..rows.len()).filter(|i| i != k).collect();
                let sigma: Vec<Poly> = minors(ring, &rows, &others).into_iter().filter(|m| !m.is_zero()).collect();
                let mut ok = true;
                for (j, row) in rows.iter().enumerate() {
                    let mut t = contract(row, &l);
                    if j == *k {
                        t = &t - &ring.one();
                    }
                    ok &= c.cert(t, &cofactors[j])?.verify(&sigma);
                }
                ok
            }
            Certificate::Tangency { field, sigma, selected, order, cofactors, .. } => {
                let Some(l) = c.field(field) else { return Ok(false) };
                let sigma = c.ps(sigma)?;
                selected.iter().all(|&i| i < sigma.len())
                    && c.cert(ring.one(), cofactors)?.verify(&lie_generators(&l, &sigma, selected, *order))
            }
            Certificate::Bezout { field, sigma, selected, a, b, .. } => {
                let Some(l) = c.field(field) else { return Ok(false) };
                let sigma = c.ps(sigma)?;
                if a.len() != selected.len() || b.len() != sigma.len() || selected.iter().any(|&i| i >= sigma.len()) {
                    return Ok(false);
                }
                let mut acc = ring.zero();
                for (row, &j) in a.iter().zip(selected) {
                    let mut d = sigma[j].clone();
                    for s in row {
                        d = l.lie(&d);
                        acc = &acc + &(&c.p(s)? * &d);
                    }
                }
                for (s, h) in b.iter().zip(&sigma) {
                    acc = &acc + &(&c.p(s)? * h);
                }
                acc.is_one()
            }
            Certificate::Solution { field, sigma, f, g, cofactors, parameter, specializations, .. } => {
                let Some(l) = c.field(field) else { return Ok(false) };
                let sigma = c.ps(sigma)?;
                let (f, g) = (c.p(f)?, c.p(g)?);
                let cert = c.cert(&l.lie(&f) - &g, cofactors)?;
                if !cert.verify(&sigma) {
                    return Ok(false);
                }
                if specializations.is_empty() {
                    return Ok(true);
                }
                let Some(name) = parameter else { return Ok(false) };
                for v in specializations {
                    let Some(v) = parse_rational(v) else { return Ok(false) };
                    let sp = |p: &Poly| p.specialize(name, &v);
                    let base = ring.without(&[name.as_str()])?;
                    let comps = l.components().iter().map(sp).collect::<Result<Vec<_>, _>>()?;
                    let Ok(ls) = VectorField::new(&base, comps) else { return Ok(false) };
                    let gens = sigma.iter().map(sp).collect::<Result<Vec<_>, _>>()?;
                    let target = &ls.lie(&sp(&f)?) - &sp(&g)?;
                    let cofs = cert.cofactors.iter().map(|(i, p)| Ok((*i, sp(p)?))).collect::<Result<_, RingError>>()?;
                    if !(MembershipCertificate { target, cofactors: cofs }).verify(&gens) {
                        return Ok(false);
                    }
                }
                true
            }
            Certificate::Product { target, multiplier, delta_rows, power, .. } => {
                let m = c.rows(delta_rows)?;
                if m.len() != ring.space_dim() {
                    return Ok(false);
                }
                let delta = determinant(&m, ring);
                let expanded = &c.p(multiplier)? * &delta.pow(*power as u32);
                expanded == c.p(target)?
            }
            Certificate::Localized { localizer, field, sigma, delta, order, cofactors, .. } => {
                let Some(l) = c.field(field) else { return Ok(false) };
                let sigma = c.ps(sigma)?;
                let mut gens = Vec::new();
                let mut level = sigma.clone();
                for j in 0..=*order {
                    if j > 0 {
                        level = level.iter().map(|p| l.lie(p)).collect();
                    }
                    gens.extend(level.iter().cloned());
                }
                if let Some(y) = localizer {
                    let yv = ring.var_named(y)?;
                    gens.push(&ring.one() - &(&yv * &c.p(delta)?));
                } else if !c.p(delta)?.is_constant() || c.p(delta)?.is_zero() {
                    return Ok(false);
                }
                c.cert(ring.one(), cofactors)?.verify(&gens)
            }
            Certificate::Contraction { row, original, field, sigma, cofactors, .. } => {
                let Some(l) = c.field(field) else { return Ok(false) };
                let target = &contract(&c.ps(row)?, &l) - &contract(&c.ps(original)?, &l);
                c.cert(target, cofactors)?.verify(&c.ps(sigma)?)
            }
            Certificate::Homotopy { t, start, end, segments, .. } => {
                let Some(base) = ring.without(&[t.as_str()]).ok() else { return Ok(false) };
                let at = |rows: &[Vec<String>], v: i64| -> Result<Vec<Vec<Poly>>, RingError> {
                    c.rows(rows)?
                        .iter()
                        .map(|r| r.iter().map(|p| p.specialize(t, &crate::ring::rat(v))).collect())
                        .collect()
                };
                let base_rows = |rows: &[Vec<String>]| -> Result<Vec<Vec<Poly>>, RingError> {
                    rows.iter().map(|r| r.iter().map(|s| base.parse(s)).collect()).collect()
                };
                let (Some(first), Some(last)) = (segments.first(), segments.last()) else { return Ok(false) };
                let mut ok = at(&first.rows, 0)? == base_rows(start)? && at(&last.rows, 1)? == base_rows(end)?;
                ok &= first.interval.0 == "0" && last.interval.1 == "1";
                for w in segments.windows(2) {
                    ok &= at(&w[0].rows, 1)? == at(&w[1].rows, 0)? && w[0].interval.1 == w[1].interval.0;
                }
                ok
            }
            Certificate::Exactness { rows, functions, .. } => {
                let rows = c.rows(rows)?;
                rows.len() == functions.len()
                    && rows.iter().zip(functions).try_fold(true, |acc, (r, f)| {
                        Ok::<bool, RingError>(acc && *r == exterior_derivative(&c.p(f)?))
                    })?
            }
        })
    }
}
