//! Piecewise-linear homotopies of form tuples and their rank certificates.

mod driver;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::geometry::{
    contract, degeneracy_ideal, exterior_derivative, FormTuple, GeometryError, VectorField,
};
use crate::grid::{GridError, GridSpec};
use crate::groebner::{GroebnerError, Ideal, MembershipCertificate};
use crate::ring::{ratio, Poly, Rational, Ring, RingError, Variable};

pub use driver::{
    replace_all_forms, DriverOptions, PipelineError, PipelineFailure, PipelineOutcome, PipelineStep, StepPath,
};

#[derive(Debug, Error, Clone)]
pub enum HomotopyError {
    #[error("endpoint mismatch between conjoined homotopies")]
    EndpointMismatch,
    #[error("homotopy has no segments")]
    Empty,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// The ring of `forms` extended by a homotopy variable.
pub fn homotopy_ring(base: &Ring) -> Result<(Ring, String), RingError> {
    let t = base.fresh_name("t");
    let ring = base.adjoin(&[Variable::homotopy(t.clone())])?;
    Ok((ring, t))
}

/// One linear piece; its own parameter runs over `[0, 1]` and covers
/// `interval` of the global parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: String,
    pub forms: FormTuple,
    pub interval: (Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homotopy {
    base: Ring,
    ring: Ring,
    t: String,
    segments: Vec<Segment>,
}

impl Homotopy {
    fn single(base: &Ring, ring: Ring, t: String, label: &str, forms: FormTuple) -> Self {
        let seg = Segment { label: label.into(), forms, interval: (Rational::zero(), Rational::from_integer(1.into())) };
        Self { base: base.clone(), ring, t, segments: vec![seg] }
    }

    pub fn constant(forms: &FormTuple) -> Result<Self, HomotopyError> {
        let (ring, t) = homotopy_ring(forms.ring())?;
        let lifted = forms.embed(&ring)?;
        Ok(Self::single(forms.ring(), ring, t, "constant", lifted))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn base_ring(&self) -> &Ring {
        &self.base
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn t_name(&self) -> &str {
        &self.t
    }

    fn at(&self, seg: &Segment, value: Rational) -> Result<FormTuple, HomotopyError> {
        let t = self.t.clone();
        Ok(seg.forms.map(&self.base, |p| p.specialize(&t, &value))?)
    }

    /// The tuple at global parameter 0.
    pub fn start(&self) -> Result<FormTuple, HomotopyError> {
        let seg = self.segments.first().ok_or(HomotopyError::Empty)?;
        self.at(seg, Rational::zero())
    }

    /// The tuple at global parameter 1.
    pub fn end(&self) -> Result<FormTuple, HomotopyError> {
        let seg = self.segments.last().ok_or(HomotopyError::Empty)?;
        self.at(seg, Rational::from_integer(1.into()))
    }

    /// Every consecutive pair of segments meets bitwise.
    pub fn endpoints_chain(&self) -> Result<bool, HomotopyError> {
        for w in self.segments.windows(2) {
            if self.at(&w[0], Rational::from_integer(1.into()))? != self.at(&w[1], Rational::zero())? {
                return Ok(false);
            }
            if w[0].interval.1 != w[1].interval.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Evaluates at a global parameter value.
    pub fn evaluate(&self, global: &Rational) -> Result<FormTuple, HomotopyError> {
        let seg = self
            .segments
            .iter()
            .find(|s| &s.interval.0 <= global && global <= &s.interval.1)
            .ok_or(HomotopyError::Empty)?;
        let local = (global - &seg.interval.0) / (&seg.interval.1 - &seg.interval.0);
        self.at(seg, local)
    }
}

/// `H(t) = H1(2t)` on `[0, 1/2]` and `H2(2t − 1)` on `[1/2, 1]`.
pub fn conjoin(h1: &Homotopy, h2: &Homotopy) -> Result<Homotopy, HomotopyError> {
    if h1.base != h2.base || h1.end()? != h2.start()? {
        return Err(HomotopyError::EndpointMismatch);
    }
    let half = ratio(1, 2);
    let mut segments = Vec::with_capacity(h1.segments.len() + h2.segments.len());
    for s in &h1.segments {
        segments.push(Segment { interval: (&s.interval.0 * &half, &s.interval.1 * &half), ..s.clone() });
    }
    for s in &h2.segments {
        let forms = s.forms.embed(&h1.ring)?;
        segments.push(Segment {
            label: s.label.clone(),
            forms,
            interval: (&half + &s.interval.0 * &half, &half + &s.interval.1 * &half),
        });
    }
    Ok(Homotopy { base: h1.base.clone(), ring: h1.ring.clone(), t: h1.t.clone(), segments })
}

fn segment_homotopy(forms: &FormTuple, k: usize, label: &str, build: impl Fn(&Poly, &Poly, &Poly) -> Poly, f: &Poly) -> Result<Homotopy, HomotopyError> {
    let (ring, t) = homotopy_ring(forms.ring())?;
    let lifted = forms.embed(&ring)?;
    let tv = ring.var_named(&t)?;
    let df = exterior_derivative(&f.embed(&ring)?);
    let row: Vec<Poly> = lifted.row(k)?.iter().zip(&df).map(|(a, d)| build(a, d, &tv)).collect();
    Ok(Homotopy::single(forms.ring(), ring.clone(), t, label, lifted.with_row(k, row)?))
}

/// Row `k` becomes `(1 − t)·φ_k + t·df`.
pub fn replacement_segment(forms: &FormTuple, k: usize, f: &Poly) -> Result<Homotopy, HomotopyError> {
    segment_homotopy(forms, k, &format!("replace {k}"), |a, d, t| &(a - &(t * a)) + &(t * d), f)
}

/// Row `p` becomes `φ_p + t·df`.
pub fn perturbation_segment(forms: &FormTuple, p: usize, f: &Poly) -> Result<Homotopy, HomotopyError> {
    segment_homotopy(forms, p, &format!("perturb {p}"), |a, d, t| a + &(t * d), f)
}

#[derive(Debug, Clone)]
pub enum RankVerdict {
    /// `1 = Σ c_i · minor_i` over all complex `(x, t)`.
    UnitIdealCertified(MembershipCertificate),
    /// Smallest over the samples of the largest absolute minor.
    SampledOnly(Rational),
    /// A sample point `(x, t)` where every minor vanishes.
    Failed(Vec<Rational>),
}

#[derive(Debug, Clone)]
pub struct RankReport {
    pub label: String,
    pub minors: Vec<Poly>,
    pub verdict: RankVerdict,
    /// Set when the algebraic check hit a resource limit.
    pub resource_fallback: bool,
}

impl RankReport {
    pub fn certified(&self) -> bool {
        matches!(self.verdict, RankVerdict::UnitIdealCertified(_))
    }
}

/// Per segment: unit ideal of all `n×n` minors over `Q[x, t]`, else
/// sampling on `K × [0, 1]` with `t_samples` values of `t`.
pub fn verify_rank(h: &Homotopy, grid: &GridSpec, t_samples: usize) -> Result<Vec<RankReport>, HomotopyError> {
    h.segments.iter().map(|s| segment_rank(h, s, grid, t_samples)).collect()
}

fn segment_rank(h: &Homotopy, seg: &Segment, grid: &GridSpec, t_samples: usize) -> Result<RankReport, HomotopyError> {
    let all: Vec<usize> = (0..seg.forms.q()).collect();
    let locus = degeneracy_ideal(&seg.forms, &all)?;
    let minors = locus.minor_polys();
    let (cert, fallback) =
        match crate::geometry::unit_certificate_over(&minors, &h.ring, locus.ideal.budget()) {
            Ok(c) => (c, false),
            Err(GroebnerError::Resource(_)) => (None, true),
            Err(e) => return Err(e.into()),
        };
    if let Some(c) = cert {
        return Ok(RankReport { label: seg.label.clone(), minors, verdict: RankVerdict::UnitIdealCertified(c), resource_fallback: false });
    }
    let ring = &h.ring;
    let ti = ring.index_of(&h.t).expect("homotopy variable");
    let space = ring.space_indices();
    if space.len() != grid.dim() {
        return Err(GridError::Dimension { grid: grid.dim(), ring: space.len() }.into());
    }
    let steps = t_samples.max(2) as i64;
    let mut best: Option<Rational> = None;
    for j in 0..steps {
        let tv = Rational::new(j.into(), (steps - 1).into());
        for pt in grid.points() {
            let mut full = vec![Rational::zero(); ring.nvars()];
            for (x, &i) in pt.iter().zip(&space) {
                full[i] = x.clone();
            }
            full[ti] = tv.clone();
            let m = minors.iter().map(|p| p.eval(&full).abs()).max().unwrap_or_else(Rational::zero);
            if m.is_zero() {
                return Ok(RankReport { label: seg.label.clone(), minors, verdict: RankVerdict::Failed(full), resource_fallback: fallback });
            }
            if best.as_ref().is_none_or(|b| m < *b) {
                best = Some(m);
            }
        }
    }
    Ok(RankReport {
        label: seg.label.clone(),
        minors,
        verdict: RankVerdict::SampledOnly(best.unwrap_or_else(Rational::zero)),
        resource_fallback: fallback,
    })
}

/// Certificate for `contract(row k of the segment, L) − contract(φ_k, L)`
/// in `J(Σ)·Q[x, t]`.
pub fn verify_contraction_invariance(
    segment: &Segment,
    original: &FormTuple,
    l: &VectorField,
    sigma: &Ideal,
    k: usize,
) -> Result<Option<MembershipCertificate>, HomotopyError> {
    let ring = segment.forms.ring();
    let lt = l.embed(ring)?;
    let target = &contract(segment.forms.row(k)?, &lt) - &contract(original.embed(ring)?.row(k)?, &lt);
    let sig = sigma.embed(ring)?;
    Ok(sig.membership(&target)?)
}
