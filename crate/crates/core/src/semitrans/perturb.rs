//! Seeded perturbations of one form toward semi-transversality.
//!
//! Genericity is not certified. Each candidate perturbation is drawn from a
//! seeded stream and accepted only after the tangency and rank properties
//! have been re-verified exactly.

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tangency_chain, ChainStatus, SemitransError, TangencyChain};
use crate::geometry::{
    construct_field_on_sigma, determinant, exterior_derivative, sigma_without, unit_certificate_over,
    verify_full_rank, DegeneracyLocus, FieldOnSigma, FormTuple, VectorField,
};
use crate::groebner::{monomials_up_to, Budget, GroebnerError, MembershipCertificate};
use crate::grid::{vector_sup_norm, GridSpec};
use crate::ring::{rat, Poly, Rational, Ring, Variable};

#[derive(Debug, Clone)]
pub struct PerturbOptions {
    pub max_retries: usize,
    /// Degree of the random multiplier `r`.
    pub degree: u32,
    pub coefficient_bound: i64,
    pub max_rounds: usize,
    /// Lie steps allowed for the global chain.
    pub chain_steps: usize,
    /// Extra degrees tried when constructing the field on `Σ`.
    pub field_extra: u32,
    pub budget: Budget,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self {
            max_retries: 5,
            degree: 2,
            coefficient_bound: 3,
            max_rounds: 4,
            chain_steps: 8,
            field_extra: 4,
            budget: Budget::default(),
        }
    }
}

/// `f = multiplier · Π factors`, each factor a generator of `J(Σ′)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCertificate {
    pub multiplier: Poly,
    pub factors: Vec<Poly>,
}

impl ProductCertificate {
    pub fn expand(&self) -> Poly {
        self.factors.iter().fold(self.multiplier.clone(), |acc, g| &acc * g)
    }

    pub fn verify(&self, f: &Poly, power: usize, sigma_prime: &[Poly]) -> bool {
        self.factors.len() == power && self.factors.iter().all(|g| sigma_prime.contains(g)) && self.expand() == *f
    }
}

/// `1 ∈ I_order + (1 − y·Δ)` in the ring extended by `y`; when `Δ` is a
/// nonzero constant the localization is trivial and no `y` is adjoined.
#[derive(Debug, Clone)]
pub struct LocalizedCheck {
    pub order: usize,
    pub ring: Ring,
    pub localizer: Poly,
    pub generators: Vec<Poly>,
    pub certificate: MembershipCertificate,
}

impl LocalizedCheck {
    pub fn verify(&self) -> bool {
        self.certificate.target.is_one() && self.certificate.verify(&self.generators)
    }
}

/// Least `j ≤ max_k` such that the chain of `field` along the ideal of
/// `sigma_gens` reaches the unit ideal off `V(delta)`.
pub fn localized_order(
    sigma_gens: &[Poly],
    field: &VectorField,
    delta: &Poly,
    max_k: usize,
    budget: Budget,
) -> Result<Option<LocalizedCheck>, GroebnerError> {
    let base = field.ring();
    let (ring, extra) = if delta.is_constant() {
        (base.clone(), Vec::new())
    } else {
        let y = base.fresh_name("y");
        let ring = base.adjoin(&[Variable::parameter(y.clone())])?;
        let yv = ring.var_named(&y)?;
        let rel = &ring.one() - &(&yv * &delta.embed(&ring)?);
        (ring, vec![rel])
    };
    let mut level: Vec<Poly> = sigma_gens.to_vec();
    let mut gens: Vec<Poly> = Vec::new();
    for j in 0..=max_k {
        if j > 0 {
            level = level.iter().map(|p| field.lie(p)).collect();
        }
        for p in &level {
            gens.push(p.embed(&ring)?);
        }
        let mut all = gens.clone();
        all.extend(extra.iter().cloned());
        if let Some(certificate) = unit_certificate_over(&all, &ring, budget)? {
            return Ok(Some(LocalizedCheck {
                order: j,
                ring: ring.clone(),
                localizer: delta.clone(),
                generators: all,
                certificate,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone)]
pub struct PerturbationRecord {
    /// Forms kept fixed next to `φ_k`; `Σ′` is their joint degeneracy locus.
    pub subset: Vec<usize>,
    pub target_form: usize,
    /// Generator of `J(Σ′)`: the determinant of the rows `subset` then `k`.
    pub delta: Poly,
    /// Polynomial multiple of the local field `L_U = field / delta`.
    pub field: VectorField,
    pub power: usize,
    pub scale: Rational,
    pub f: Poly,
    pub product: ProductCertificate,
    pub epsilon: Rational,
    /// Grid sup norm of `df` (sum over components).
    pub df_norm: Rational,
    pub seed: u64,
    /// `None` for the zero perturbation.
    pub stream: Option<u64>,
    pub attempts: usize,
    pub failed_streams: Vec<u64>,
    pub localized: LocalizedCheck,
    /// `φ_p + t·df` over the ring extended by `t`.
    pub family: FormTuple,
    pub family_rank: MembershipCertificate,
}

/// Polynomial multiple `Δ·L_U` of the field with `φ_j L_U = 0` for `j` in
/// `rows[..n-1]` and `φ_k L_U = 1` for the last row: `Δ` times the last
/// column of the inverse, i.e. the last column of the adjugate.
fn adjugate_field(forms: &FormTuple, rows: &[usize]) -> Result<VectorField, SemitransError> {
    let ring = forms.ring();
    let n = forms.n();
    let m: Vec<Vec<Poly>> = rows.iter().map(|&i| forms.rows()[i].clone()).collect();
    let last = n - 1;
    let comps = (0..n)
        .map(|i| {
            let minor: Vec<Vec<Poly>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != last)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, p)| p.clone()).collect())
                .collect();
            let d = determinant(&minor, ring);
            if (last + i).is_multiple_of(2) {
                d
            } else {
                -d
            }
        })
        .collect();
    Ok(VectorField::new(ring, comps)?)
}

fn random_multiplier(ring: &Ring, rng: &mut ChaCha8Rng, degree: u32, bound: i64) -> Poly {
    let monos = monomials_up_to(ring, &ring.space_indices(), degree);
    loop {
        let terms: Vec<(Vec<u32>, Rational)> =
            monos.iter().map(|m| (m.clone(), rat(rng.gen_range(-bound..=bound)))).collect();
        let r = ring.from_terms(terms);
        if !r.is_zero() {
            return r;
        }
    }
}

fn homotopy_ring(ring: &Ring) -> Result<(Ring, usize), SemitransError> {
    let t = ring.fresh_name("t");
    let rt = ring.adjoin(&[Variable::homotopy(t.clone())])?;
    let idx = rt.index_of(&t).expect("just adjoined");
    Ok((rt, idx))
}

/// Rank certificate for `φ_p + t·df` over all complex `(x, t)`.
fn family_rank(forms: &FormTuple, p: usize, f: &Poly) -> Result<Option<(FormTuple, MembershipCertificate)>, SemitransError> {
    let (rt, ti) = homotopy_ring(forms.ring())?;
    let lifted = forms.embed(&rt)?;
    let t = rt.var(ti);
    let df = exterior_derivative(&f.embed(&rt)?);
    let row: Vec<Poly> = lifted.rows()[p].iter().zip(&df).map(|(a, d)| a + &(&t * d)).collect();
    let family = lifted.with_row(p, row)?;
    let verdict = verify_full_rank(&family)?;
    Ok(verdict.certificate.map(|c| (family, c)))
}

/// Perturbs the smallest-index form outside `subset ∪ {k}` by `df` with
/// `f ∈ J(Σ′)^{n+2}` and `|df|_K < ε`, accepting the first candidate whose
/// local field is tangent to the new `Σ` with order at most `n+1` off `Σ′`
/// and whose linear family keeps rank `n`. The zero perturbation is tried first.
#[allow(clippy::too_many_arguments)]
pub fn perturb_for_semitransversality(
    forms: &FormTuple,
    k: usize,
    subset: &[usize],
    grid: &GridSpec,
    epsilon: &Rational,
    seed: u64,
    round: usize,
    opts: &PerturbOptions,
) -> Result<(PerturbationRecord, FormTuple), SemitransError> {
    let ring = forms.ring();
    let n = forms.n();
    let invalid = || SemitransError::InvalidSubset(subset.to_vec());
    if subset.len() + 1 != n || subset.contains(&k) || subset.iter().any(|&i| i >= forms.q()) {
        return Err(invalid());
    }
    let mut rows = subset.to_vec();
    rows.push(k);
    let m: Vec<Vec<Poly>> = rows.iter().map(|&i| forms.rows()[i].clone()).collect();
    let delta = determinant(&m, ring);
    if delta.is_zero() {
        return Err(invalid());
    }
    let p = (0..forms.q()).find(|i| !rows.contains(i)).ok_or_else(invalid)?;
    let field = adjugate_field(forms, &rows)?;
    let power = n + 2;
    let delta_power = delta.pow(power as u32);

    let mut failed = Vec::new();
    let attempt = |f: Poly, multiplier: Poly, scale: Rational, stream: Option<u64>| -> Result<Option<(PerturbationRecord, FormTuple)>, SemitransError> {
        let df = exterior_derivative(&f);
        let row: Vec<Poly> = forms.rows()[p].iter().zip(&df).map(|(a, d)| a + d).collect();
        let candidate = forms.with_row(p, row)?;
        let sigma = sigma_without(&candidate, k)?;
        let Some(localized) = localized_order(sigma.ideal.generators(), &field, &delta, n + 1, opts.budget)? else {
            return Ok(None);
        };
        let Some((family, family_rank)) = family_rank(forms, p, &f)? else {
            return Ok(None);
        };
        let record = PerturbationRecord {
            subset: subset.to_vec(),
            target_form: p,
            delta: delta.clone(),
            field: field.clone(),
            power,
            scale,
            df_norm: vector_sup_norm(&df, grid)?,
            product: ProductCertificate { multiplier, factors: vec![delta.clone(); power] },
            f,
            epsilon: epsilon.clone(),
            seed,
            stream,
            attempts: 0,
            failed_streams: Vec::new(),
            localized,
            family,
            family_rank,
        };
        Ok(Some((record, candidate)))
    };

    let finish = |(mut rec, forms): (PerturbationRecord, FormTuple), attempts: usize, failed: Vec<u64>| {
        rec.attempts = attempts;
        rec.failed_streams = failed;
        Ok((rec, forms))
    };

    if let Some(found) = attempt(ring.zero(), ring.zero(), Rational::zero(), None)? {
        return finish(found, 0, failed);
    }
    for retry in 0..opts.max_retries {
        let stream = ((round as u64) << 16) | retry as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let r = random_multiplier(ring, &mut rng, opts.degree, opts.coefficient_bound);
        let f0 = &r * &delta_power;
        let norm = vector_sup_norm(&exterior_derivative(&f0), grid)?;
        let scale = scale_below(&norm, epsilon);
        let Some(scale) = scale else {
            failed.push(stream);
            continue;
        };
        let multiplier = r.scale(&scale);
        let f = f0.scale(&scale);
        match attempt(f, multiplier, scale, Some(stream))? {
            Some(found) => return finish(found, retry + 1, failed),
            None => failed.push(stream),
        }
    }
    Err(SemitransError::RetriesExhausted { failed })
}

/// Largest `2^{-m}`, `0 ≤ m ≤ 64`, with `2^{-m}·norm < ε`; `None` when no
/// such scale exists.
fn scale_below(norm: &Rational, epsilon: &Rational) -> Option<Rational> {
    if *epsilon <= Rational::zero() {
        return None;
    }
    let half = Rational::new(1.into(), 2.into());
    let mut c = Rational::one();
    for _ in 0..=64 {
        if &c * norm < *epsilon {
            return Some(c);
        }
        c = &c * &half;
    }
    None
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub forms: FormTuple,
    pub records: Vec<PerturbationRecord>,
    pub sigma: DegeneracyLocus,
    pub field: FieldOnSigma,
    pub chain: TangencyChain,
    pub order: usize,
}

/// The `(n−1)`-subsets of the forms other than `k` whose determinant with
/// `φ_k` is not identically zero, in lexicographic order.
pub fn usable_subsets(forms: &FormTuple, k: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..forms.q()).filter(|&i| i != k).collect();
    others
        .into_iter()
        .combinations(forms.n() - 1)
        .filter(|s| {
            let mut rows: Vec<Vec<Poly>> = s.iter().map(|&i| forms.rows()[i].clone()).collect();
            rows.push(forms.rows()[k].clone());
            !determinant(&rows, forms.ring()).is_zero()
        })
        .collect()
}

/// Perturbs forms other than `φ_k` until the field on `Σ` has finite
/// tangency order, cycling through the usable subsets with budget `ε/2^round`.
pub fn reduction_loop(
    forms: &FormTuple,
    k: usize,
    grid: &GridSpec,
    epsilon: &Rational,
    seed: u64,
    opts: &PerturbOptions,
) -> Result<ReductionOutcome, SemitransError> {
    let mut current = forms.clone();
    let mut records = Vec::new();
    for round in 0..=opts.max_rounds {
        let mut sigma = sigma_without(&current, k)?;
        sigma.ideal = sigma.ideal.clone().with_budget(opts.budget);
        let field = construct_field_on_sigma(&current, k, &sigma.ideal, opts.field_extra)?;
        let chain = tangency_chain(&sigma.ideal, &field.field, opts.chain_steps)?;
        let locus = match &chain.status {
            ChainStatus::ReachedUnit(order) => {
                let order = *order;
                return Ok(ReductionOutcome { forms: current, records, sigma, field, chain, order });
            }
            ChainStatus::Stabilized(i) => i.generators().iter().map(|p| p.to_string()).collect(),
            ChainStatus::BudgetExceeded => {
                chain.ideals.last().expect("nonempty").generators().iter().map(|p| p.to_string()).collect()
            }
        };
        let subsets = usable_subsets(&current, k);
        if round == opts.max_rounds || subsets.is_empty() {
            return Err(SemitransError::MaxRoundsExceeded { rounds: round, locus });
        }
        let subset = &subsets[round % subsets.len()];
        let eps = epsilon / Rational::from_integer(num_bigint::BigInt::from(2u32).pow(round as u32 + 1));
        let (record, next) = perturb_for_semitransversality(&current, k, subset, grid, &eps, seed, round, opts)?;
        records.push(record);
        current = next;
    }
    unreachable!("the last round returns")
}
