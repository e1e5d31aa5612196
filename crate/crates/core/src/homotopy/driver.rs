//! Replaces every form of a full-rank tuple by an exact differential.

use thiserror::Error;

use super::{
    conjoin, perturbation_segment, replacement_segment, verify_contraction_invariance, verify_rank, Homotopy,
    HomotopyError, RankReport, RankVerdict,
};
use crate::geometry::{
    construct_field_on_sigma, exterior_derivative, sigma_without, verify_full_rank, DegeneracyLocus, FieldOnSigma,
    FormTuple, GeometryError,
};
use crate::grid::GridSpec;
use crate::groebner::{GroebnerError, MembershipCertificate};
use crate::ring::{Poly, Rational};
use crate::semitrans::{
    extract_certificate, reduction_loop, tangency_chain, ChainStatus, PerturbOptions, PerturbationRecord,
    SemitransError, TangencyCertificate,
};
use crate::solver::{
    bezout_lift, solve_step_2_2, solve_step_2_2_direct, solve_step_2_2_exact, BezoutData, SolverError, Step22Solution,
};

#[derive(Debug, Error, Clone)]
pub enum PipelineError {
    #[error("need more forms than dimensions, got q = {q} and n = {n}")]
    OpenCase { q: usize, n: usize },
    #[error("the input tuple is not certified to have full rank")]
    NotFullRank,
    #[error("segment {label} loses rank at {witness:?}")]
    RankFailed { label: String, witness: Vec<String> },
    #[error("contraction with the field changes off the locus in segment {0}")]
    ContractionChanged(String),
    #[error("final forms are not the differentials of the computed functions")]
    NotExact,
    #[error(transparent)]
    Semitrans(#[from] SemitransError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

impl PipelineError {
    /// True when the failure came from a Gröbner budget.
    pub fn is_resource(&self) -> bool {
        let g = match self {
            PipelineError::Groebner(g) => Some(g),
            PipelineError::Geometry(GeometryError::Groebner(g)) => Some(g),
            PipelineError::Semitrans(SemitransError::Groebner(g)) => Some(g),
            PipelineError::Semitrans(SemitransError::Geometry(GeometryError::Groebner(g))) => Some(g),
            PipelineError::Solver(SolverError::Groebner(g)) => Some(g),
            PipelineError::Homotopy(HomotopyError::Groebner(g)) => Some(g),
            _ => None,
        };
        matches!(g, Some(GroebnerError::Resource(_)))
    }
}

#[derive(Debug, Clone)]
pub struct DriverOptions {
    pub perturb: PerturbOptions,
    pub epsilon: Rational,
    pub seed: u64,
    /// Values of `t` per segment when rank falls back to sampling.
    pub t_samples: usize,
    /// Degree bound for solving `L h ≡ 1 − L g_k` directly before perturbing; `None` skips it.
    pub direct_degree: Option<u32>,
}

impl Default for DriverOptions {
    fn default() -> Self {
        Self { perturb: PerturbOptions::default(), epsilon: crate::ring::ratio(1, 10), seed: 0, t_samples: 9, direct_degree: Some(3) }
    }
}

#[derive(Debug, Clone)]
pub enum StepPath {
    /// `1 − L g_k` already lies in `J(Σ)`, so `h = 0` and no perturbation is needed.
    Exact,
    /// `h` found by a degree-bounded linear solve, without a tangency certificate.
    Direct { degree: u32 },
    Solved { order: usize, certificate: Box<TangencyCertificate>, bezout: BezoutData },
}

#[derive(Debug, Clone)]
pub struct PipelineStep {
    pub k: usize,
    pub forms_before: FormTuple,
    pub records: Vec<PerturbationRecord>,
    /// Forms after the perturbations, before row `k` is replaced.
    pub reduced: FormTuple,
    pub sigma: DegeneracyLocus,
    pub field: FieldOnSigma,
    pub path: StepPath,
    pub solution: Step22Solution,
    pub homotopy: Homotopy,
    pub rank: Vec<RankReport>,
    pub contraction: MembershipCertificate,
    pub forms_after: FormTuple,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub input: FormTuple,
    pub input_rank: MembershipCertificate,
    pub steps: Vec<PipelineStep>,
    /// Concatenation of every step's segments.
    pub homotopy: Option<Homotopy>,
    /// `functions[k]` once row `k` has been replaced.
    pub functions: Vec<Option<Poly>>,
    pub final_forms: FormTuple,
}

impl PipelineOutcome {
    pub fn complete(&self) -> bool {
        self.steps.len() == self.input.q()
    }

    pub fn all_rank_certified(&self) -> bool {
        self.steps.iter().flat_map(|s| &s.rank).all(RankReport::certified)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineFailure {
    pub partial: Option<Box<PipelineOutcome>>,
    /// Row being replaced when the failure happened.
    pub k: Option<usize>,
    pub error: PipelineError,
}

fn fail(partial: &PipelineOutcome, k: usize, error: impl Into<PipelineError>) -> PipelineFailure {
    PipelineFailure { partial: Some(Box::new(partial.clone())), k: Some(k), error: error.into() }
}

fn bare(error: impl Into<PipelineError>) -> PipelineFailure {
    PipelineFailure { partial: None, k: None, error: error.into() }
}

/// Replaces `φ_1, …, φ_q` in order by differentials `df_k`, recording a
/// piecewise-linear homotopy through full-rank tuples. `primitives[k]` is an
/// optional `g_k` with `dg_k ≈ φ_k` on the grid; missing ones are zero.
pub fn replace_all_forms(
    forms: &FormTuple,
    primitives: &[Option<Poly>],
    grid: &GridSpec,
    opts: &DriverOptions,
) -> Result<PipelineOutcome, PipelineFailure> {
    let (n, q) = (forms.n(), forms.q());
    if q <= n {
        return Err(bare(PipelineError::OpenCase { q, n }));
    }
    let input_rank = verify_full_rank(forms).map_err(bare)?.certificate.ok_or_else(|| bare(PipelineError::NotFullRank))?;
    let mut primitives: Vec<Option<Poly>> = (0..q).map(|i| primitives.get(i).cloned().flatten()).collect();
    let mut out = PipelineOutcome {
        input: forms.clone(),
        input_rank,
        steps: Vec::new(),
        homotopy: None,
        functions: vec![None; q],
        final_forms: forms.clone(),
    };
    for k in 0..q {
        let step = run_step(&out, k, &primitives, grid, opts).map_err(|e| fail(&out, k, e))?;
        for r in &step.records {
            if r.f.is_zero() {
                continue;
            }
            let p = r.target_form;
            for slot in [&mut out.functions[p], &mut primitives[p]] {
                if let Some(g) = slot.as_mut() {
                    *g = &*g + &r.f;
                }
            }
        }
        out.functions[k] = Some(step.solution.f_k.clone());
        out.homotopy = Some(match &out.homotopy {
            None => step.homotopy.clone(),
            Some(h) => conjoin(h, &step.homotopy).map_err(|e| fail(&out, k, e))?,
        });
        out.final_forms = step.forms_after.clone();
        out.steps.push(step);
    }
    for (k, f) in out.functions.iter().enumerate() {
        let f = f.as_ref().expect("every row replaced");
        if out.final_forms.rows()[k] != exterior_derivative(f) {
            return Err(fail(&out, k, PipelineError::NotExact));
        }
    }
    Ok(out)
}

fn run_step(
    out: &PipelineOutcome,
    k: usize,
    primitives: &[Option<Poly>],
    grid: &GridSpec,
    opts: &DriverOptions,
) -> Result<PipelineStep, PipelineError> {
    let before = out.final_forms.clone();
    let ring = before.ring();
    let g_k = primitives[k].clone().unwrap_or_else(|| ring.zero());
    let po = &opts.perturb;

    let mut sigma = sigma_without(&before, k)?;
    sigma.ideal = sigma.ideal.clone().with_budget(po.budget);
    let field = construct_field_on_sigma(&before, k, &sigma.ideal, po.field_extra)?;
    let exact = solve_step_2_2_exact(&sigma.ideal, &field.field, &g_k, grid)?;

    let (records, reduced, sigma, field, path, solution) = if let Some(sol) = exact {
        (Vec::new(), before.clone(), sigma, field, StepPath::Exact, sol)
    } else {
        let chain = tangency_chain(&sigma.ideal, &field.field, po.chain_steps)?;
        let direct = match (&chain.status, opts.direct_degree) {
            (ChainStatus::ReachedUnit(_), _) | (_, None) => None,
            (_, Some(d)) => solve_step_2_2_direct(&sigma.ideal, &field.field, &g_k, d, grid)?.map(|s| (d, s)),
        };
        if let Some((degree, sol)) = direct {
            (Vec::new(), before.clone(), sigma, field, StepPath::Direct { degree }, sol)
        } else {
            let red = reduction_loop(&before, k, grid, &opts.epsilon, opts.seed.wrapping_add(k as u64), po)?;
            let cert = extract_certificate(&red.chain, &red.sigma.ideal, &red.field.field)?;
            let bez = bezout_lift(&cert);
            let sol = solve_step_2_2(&red.forms, k, &red.sigma.ideal, &red.field, &g_k, &cert, &bez, grid)?;
            let path = StepPath::Solved { order: red.order, certificate: Box::new(cert), bezout: bez };
            (red.records, red.forms, red.sigma, red.field, path, sol)
        }
    };

    let mut pieces = Vec::new();
    let mut current = before.clone();
    for r in &records {
        if r.f.is_zero() {
            continue;
        }
        let seg = perturbation_segment(&current, r.target_form, &r.f)?;
        current = seg.end()?;
        pieces.push(seg);
    }
    debug_assert_eq!(current, reduced);
    let replace = replacement_segment(&reduced, k, &solution.f_k)?;
    let contraction = verify_contraction_invariance(&replace.segments()[0], &reduced, &field.field, &sigma.ideal, k)?
        .ok_or_else(|| PipelineError::ContractionChanged(replace.segments()[0].label.clone()))?;
    let after = replace.end()?;
    pieces.push(replace);
    let mut homotopy = pieces[0].clone();
    for p in &pieces[1..] {
        homotopy = conjoin(&homotopy, p)?;
    }
    let rank = verify_rank(&homotopy, grid, opts.t_samples)?;
    for r in &rank {
        if let RankVerdict::Failed(w) = &r.verdict {
            return Err(PipelineError::RankFailed {
                label: r.label.clone(),
                witness: w.iter().map(crate::ring::format_rational).collect(),
            });
        }
    }
    Ok(PipelineStep {
        k,
        forms_before: before,
        records,
        reduced,
        sigma,
        field,
        path,
        solution,
        homotopy,
        rank,
        contraction,
        forms_after: after,
    })
}
