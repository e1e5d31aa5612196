//! Tangency order of a vector field along a variety.
//!
//! The chain `I_0 = J(Σ)`, `I_{k+1} = I_k + (L f : f ∈ I_k)` is generated by
//! `L^j h` for the generators `h` of `J(Σ)` and `j ≤ k`, so it is computed
//! level by level from the generators alone.

mod perturb;

use thiserror::Error;

use crate::geometry::{unit_certificate_over, GeometryError, VectorField};
use crate::groebner::{GroebnerError, Ideal, MembershipCertificate};
use crate::grid::GridError;
use crate::ring::{Poly, RingError};

pub use perturb::{
    localized_order, perturb_for_semitransversality, reduction_loop, LocalizedCheck, PerturbOptions,
    PerturbationRecord, ProductCertificate, ReductionOutcome,
};

#[derive(Debug, Error, Clone)]
pub enum SemitransError {
    #[error("chain undecided after {0} steps")]
    Indeterminate(usize),
    #[error("the chain did not reach the unit ideal")]
    NotUnit,
    #[error("subset {0:?} does not give a usable local field")]
    InvalidSubset(Vec<usize>),
    #[error("no accepted perturbation; failed streams {failed:?}")]
    RetriesExhausted { failed: Vec<u64> },
    #[error("no finite order after {rounds} rounds; surviving locus generated by {locus:?}")]
    MaxRoundsExceeded { rounds: usize, locus: Vec<String> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone)]
pub enum ChainStatus {
    ReachedUnit(usize),
    Stabilized(Ideal),
    BudgetExceeded,
}

/// Ascending chain of ideals for a field along `Σ`.
#[derive(Debug, Clone)]
pub struct TangencyChain {
    /// `levels[j][i] = L^j h_i` for the generators `h_i` of `J(Σ)`.
    pub levels: Vec<Vec<Poly>>,
    pub ideals: Vec<Ideal>,
    pub status: ChainStatus,
}

impl TangencyChain {
    pub fn generators_up_to(&self, k: usize) -> Vec<Poly> {
        self.levels[..=k].iter().flatten().cloned().collect()
    }
}

/// Computes the chain until it contains 1, stops growing, or `max_steps`
/// Lie steps have been taken.
pub fn tangency_chain(sigma: &Ideal, l: &VectorField, max_steps: usize) -> Result<TangencyChain, GroebnerError> {
    let ring = sigma.ring();
    let budget = sigma.budget();
    let mut levels = vec![sigma.generators().to_vec()];
    let mut ideals = vec![sigma.clone()];
    if sigma.is_unit_ideal()?.is_some() {
        return Ok(TangencyChain { levels, ideals, status: ChainStatus::ReachedUnit(0) });
    }
    for k in 1..=max_steps {
        let next: Vec<Poly> = levels[k - 1].iter().map(|p| l.lie(p)).collect();
        let prev = &ideals[k - 1];
        let mut grows = false;
        for p in &next {
            if !prev.contains(p)? {
                grows = true;
                break;
            }
        }
        levels.push(next);
        let ideal = Ideal::new(ring, levels.iter().flatten().cloned().collect())?.with_budget(budget);
        if !grows {
            ideals.push(ideal);
            let stable = ideals[k - 1].clone();
            return Ok(TangencyChain { levels, ideals, status: ChainStatus::Stabilized(stable) });
        }
        let unit = ideal.is_unit_ideal()?.is_some();
        ideals.push(ideal);
        if unit {
            return Ok(TangencyChain { levels, ideals, status: ChainStatus::ReachedUnit(k) });
        }
    }
    Ok(TangencyChain { levels, ideals, status: ChainStatus::BudgetExceeded })
}

#[derive(Debug, Clone)]
pub enum TangencyOrder {
    Finite(usize),
    /// The stabilized ideal, whose variety contains the points of infinite order.
    NotSemiTransversal(Ideal),
}

pub fn tangency_order(sigma: &Ideal, l: &VectorField, max_steps: usize) -> Result<TangencyOrder, SemitransError> {
    let chain = tangency_chain(sigma, l, max_steps)?;
    match chain.status {
        ChainStatus::ReachedUnit(n) => Ok(TangencyOrder::Finite(n)),
        ChainStatus::Stabilized(i) => Ok(TangencyOrder::NotSemiTransversal(i)),
        ChainStatus::BudgetExceeded => Err(SemitransError::Indeterminate(max_steps)),
    }
}

/// Witness of semi-transversality: selected generators `f_j` of `J(Σ)` and an
/// order `N` such that `J(Σ) + (L^k f_j : 1 ≤ k ≤ N)` is the unit ideal.
#[derive(Debug, Clone)]
pub struct TangencyCertificate {
    /// Indices into the generators of `J(Σ)`.
    pub selected: Vec<usize>,
    pub functions: Vec<Poly>,
    /// `functions[j]` as a combination of the generators of `J(Σ)`.
    pub memberships: Vec<MembershipCertificate>,
    pub order: usize,
    /// `sigma_generators` followed by `L^k f_j`, `k = 1..=N` outer, `j` inner.
    pub generators: Vec<Poly>,
    pub sigma_len: usize,
    pub unit: MembershipCertificate,
}

impl TangencyCertificate {
    /// Position of `L^k f_j` in `generators`.
    pub fn lie_index(&self, j: usize, k: usize) -> usize {
        self.sigma_len + (k - 1) * self.functions.len() + j
    }

    /// Recomputes every derivative and re-expands every identity.
    pub fn verify(&self, sigma_generators: &[Poly], l: &VectorField) -> bool {
        if sigma_generators.len() != self.sigma_len || self.generators[..self.sigma_len] != *sigma_generators {
            return false;
        }
        let expected = self.generators.len() == self.sigma_len + self.order * self.functions.len();
        if !expected {
            return false;
        }
        for (j, f) in self.functions.iter().enumerate() {
            if !self.memberships[j].verify(sigma_generators) || self.memberships[j].target != *f {
                return false;
            }
            let mut d = f.clone();
            for k in 1..=self.order {
                d = l.lie(&d);
                if self.generators[self.lie_index(j, k)] != d {
                    return false;
                }
            }
        }
        self.unit.target.is_one() && self.unit.verify(&self.generators)
    }
}

fn certificate_generators(sigma_gens: &[Poly], l: &VectorField, selected: &[usize], order: usize) -> Vec<Poly> {
    let mut gens = sigma_gens.to_vec();
    let mut current: Vec<Poly> = selected.iter().map(|&i| sigma_gens[i].clone()).collect();
    for _ in 1..=order {
        current = current.iter().map(|p| l.lie(p)).collect();
        gens.extend(current.iter().cloned());
    }
    gens
}

/// Greedily drops generators of `J(Σ)` from the selection, last first,
/// while the unit certificate survives; `N` is the chain's order.
pub fn extract_certificate(
    chain: &TangencyChain,
    sigma: &Ideal,
    l: &VectorField,
) -> Result<TangencyCertificate, SemitransError> {
    let ChainStatus::ReachedUnit(order) = chain.status else {
        return Err(SemitransError::NotUnit);
    };
    let ring = sigma.ring();
    let sigma_gens = sigma.generators();
    let spans_unit = |selected: &[usize]| -> Result<bool, GroebnerError> {
        let gens = certificate_generators(sigma_gens, l, selected, order);
        let nonzero: Vec<Poly> = gens.into_iter().filter(|p| !p.is_zero()).collect();
        Ok(Ideal::new(ring, nonzero)?.with_budget(sigma.budget()).reduced_basis()?.is_unit())
    };
    let mut selected: Vec<usize> = (0..sigma_gens.len()).collect();
    if !spans_unit(&selected)? {
        return Err(SemitransError::NotUnit);
    }
    for i in (0..sigma_gens.len()).rev() {
        if selected.len() == 1 {
            break;
        }
        let trial: Vec<usize> = selected.iter().copied().filter(|&j| j != i).collect();
        if spans_unit(&trial)? {
            selected = trial;
        }
    }
    let generators = certificate_generators(sigma_gens, l, &selected, order);
    let unit = unit_certificate_over(&generators, ring, sigma.budget())?.ok_or(SemitransError::NotUnit)?;
    let functions: Vec<Poly> = selected.iter().map(|&i| sigma_gens[i].clone()).collect();
    let memberships = selected
        .iter()
        .map(|&i| MembershipCertificate { target: sigma_gens[i].clone(), cofactors: vec![(i, ring.one())] })
        .collect();
    Ok(TangencyCertificate { selected, functions, memberships, order, generators, sigma_len: sigma_gens.len(), unit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::ideal_equal;
    use crate::ring::{rat, Ring};

    fn setup(gens: &[&str], field: &[&str]) -> (Ring, Ideal, VectorField) {
        let r = Ring::affine(2);
        let i = Ideal::parse(&r, gens).unwrap();
        let l = VectorField::parse(&r, field).unwrap();
        (r, i, l)
    }

    #[test]
    fn chain_examples() {
        let (_, i, l) = setup(&["x2"], &["0", "1"]);
        assert!(matches!(tangency_chain(&i, &l, 5).unwrap().status, ChainStatus::ReachedUnit(1)));
        let (r, i, l) = setup(&["x2"], &["1", "0"]);
        match tangency_chain(&i, &l, 5).unwrap().status {
            ChainStatus::Stabilized(s) => assert!(ideal_equal(&s, &Ideal::parse(&r, &["x2"]).unwrap()).unwrap()),
            other => panic!("{other:?}"),
        }
        let (_, i, l) = setup(&["x1^2 - x2"], &["1", "0"]);
        let chain = tangency_chain(&i, &l, 5).unwrap();
        assert!(matches!(chain.status, ChainStatus::ReachedUnit(2)));
        assert_eq!(chain.levels[1][0].to_string(), "2*x1");
    }

    #[test]
    fn order_examples() {
        let (_, i, l) = setup(&["x1^3 - x2"], &["1", "0"]);
        assert!(matches!(tangency_order(&i, &l, 10).unwrap(), TangencyOrder::Finite(3)));
        let (_, i, l) = setup(&["x2"], &["1", "0"]);
        assert!(matches!(tangency_order(&i, &l, 10).unwrap(), TangencyOrder::NotSemiTransversal(_)));
        let (_, i, l) = setup(&["1"], &["x1", "x2"]);
        assert!(matches!(tangency_order(&i, &l, 10).unwrap(), TangencyOrder::Finite(0)));
        let (_, i, l) = setup(&["x1^5 - x2"], &["1", "0"]);
        assert!(matches!(tangency_order(&i, &l, 3), Err(SemitransError::Indeterminate(3))));
    }

    #[test]
    fn certificate_examples() {
        let (r, i, l) = setup(&["x2"], &["0", "1"]);
        let c = extract_certificate(&tangency_chain(&i, &l, 5).unwrap(), &i, &l).unwrap();
        assert_eq!((c.functions.clone(), c.order), (vec![r.var(1)], 1));
        assert!(c.verify(i.generators(), &l));

        let (r, i, l) = setup(&["x1^2 - x2"], &["1", "0"]);
        let c = extract_certificate(&tangency_chain(&i, &l, 5).unwrap(), &i, &l).unwrap();
        assert_eq!(c.order, 2);
        assert_eq!(c.unit.cofactors, vec![(c.lie_index(0, 2), r.constant(rat(1) / rat(2)))]);
        assert!(c.verify(i.generators(), &l));

        let (r, i, l) = setup(&["x1", "x2"], &["1", "1"]);
        let c = extract_certificate(&tangency_chain(&i, &l, 5).unwrap(), &i, &l).unwrap();
        assert_eq!(c.functions, vec![r.var(0)]);
        assert!(c.verify(i.generators(), &l));
    }

    #[test]
    fn tampered_certificate_fails() {
        let (r, i, l) = setup(&["x1^2 - x2"], &["1", "0"]);
        let mut c = extract_certificate(&tangency_chain(&i, &l, 5).unwrap(), &i, &l).unwrap();
        c.unit.cofactors[0].1 = r.one();
        assert!(!c.verify(i.generators(), &l));
    }
}
