//! Tuples of polynomial 1-forms, degeneracy loci and vector fields.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{
    degree_bounded_linear_solve, Budget, GroebnerError, Ideal, LinearConstraint, MembershipCertificate,
};
use crate::ring::{Poly, Ring, RingError, VarKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("subset of size {size} is too small for rank {n}")]
    SubsetTooSmall { size: usize, n: usize },
    #[error("form index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("malformed form tuple: {0}")]
    Shape(String),
    #[error("no field on the locus with components of degree at most {0}")]
    NoSolutionAtDegree(u32),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `q` forms `φ_i = Σ_j rows[i][j] dx_j` on a space of dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormTuple {
    ring: Ring,
    rows: Vec<Vec<Poly>>,
}

/// JSON shape of a form tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTupleSpec {
    pub n: usize,
    pub q: usize,
    pub rows: Vec<Vec<String>>,
}

impl FormTuple {
    pub fn new(ring: &Ring, rows: Vec<Vec<Poly>>) -> Result<Self, GeometryError> {
        let n = ring.space_dim();
        if n == 0 {
            return Err(GeometryError::Shape("ring has no space variables".into()));
        }
        for row in &rows {
            if row.len() != n {
                return Err(GeometryError::Shape(format!("row of length {} in dimension {n}", row.len())));
            }
            if row.iter().any(|p| p.ring() != ring) {
                return Err(RingError::ContextMismatch.into());
            }
        }
        Ok(Self { ring: ring.clone(), rows })
    }

    pub fn parse(ring: &Ring, rows: &[&[&str]]) -> Result<Self, GeometryError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, rows)
    }

    pub fn from_spec(ring: &Ring, spec: &FormTupleSpec) -> Result<Self, GeometryError> {
        if spec.rows.len() != spec.q || spec.n != ring.space_dim() {
            return Err(GeometryError::Shape(format!(
                "declared {}x{} but ring has {} space variables and {} rows were given",
                spec.q,
                spec.n,
                ring.space_dim(),
                spec.rows.len()
            )));
        }
        let rows: Vec<Vec<&str>> = spec.rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        Self::parse(ring, &refs)
    }

    pub fn to_spec(&self) -> FormTupleSpec {
        FormTupleSpec {
            n: self.n(),
            q: self.q(),
            rows: self.rows.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.ring.space_dim()
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Result<&[Poly], GeometryError> {
        self.rows.get(i).map(Vec::as_slice).ok_or(GeometryError::IndexOutOfRange(i))
    }

    pub fn with_row(&self, i: usize, row: Vec<Poly>) -> Result<Self, GeometryError> {
        self.row(i)?;
        let mut rows = self.rows.clone();
        rows[i] = row;
        Self::new(&self.ring, rows)
    }

    pub fn select(&self, subset: &[usize]) -> Result<Self, GeometryError> {
        let rows = subset.iter().map(|&i| self.row(i).map(<[Poly]>::to_vec)).collect::<Result<_, _>>()?;
        Self::new(&self.ring, rows)
    }

    pub fn embed(&self, ring: &Ring) -> Result<Self, GeometryError> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|p| p.embed(ring)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, rows)
    }

    /// Applies `f` to every coefficient and re-homes the result in `ring`.
    pub fn map(&self, ring: &Ring, f: impl Fn(&Poly) -> Result<Poly, RingError>) -> Result<Self, GeometryError> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, rows)
    }

    /// Maximal total degree of any coefficient.
    pub fn max_degree(&self) -> u32 {
        self.rows.iter().flatten().filter_map(Poly::degree).max().unwrap_or(0)
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Poly>], ring: &Ring) -> Poly {
    let k = m.len();
    match k {
        0 => ring.one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = ring.zero();
            for c in 0..k {
                if m[0][c].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = &m[0][c] * &determinant(&sub, ring);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Locus where the selected forms have rank below `n`.
#[derive(Debug, Clone)]
pub struct DegeneracyLocus {
    pub subset: Vec<usize>,
    /// One entry per `n`-subset of `subset`, in lexicographic order.
    pub minors: Vec<(Vec<usize>, Poly)>,
    pub ideal: Ideal,
}

impl DegeneracyLocus {
    pub fn minor_polys(&self) -> Vec<Poly> {
        self.minors.iter().map(|(_, p)| p.clone()).collect()
    }
}

pub fn degeneracy_ideal(forms: &FormTuple, subset: &[usize]) -> Result<DegeneracyLocus, GeometryError> {
    let n = forms.n();
    if subset.len() < n {
        return Err(GeometryError::SubsetTooSmall { size: subset.len(), n });
    }
    for &i in subset {
        forms.row(i)?;
    }
    let minors: Vec<(Vec<usize>, Poly)> = subset
        .iter()
        .copied()
        .combinations(n)
        .map(|rows| {
            let m: Vec<Vec<Poly>> = rows.iter().map(|&i| forms.rows[i].clone()).collect();
            let d = determinant(&m, forms.ring());
            (rows, d)
        })
        .collect();
    let ideal = Ideal::new(forms.ring(), minors.iter().map(|(_, p)| p.clone()).collect())?;
    Ok(DegeneracyLocus { subset: subset.to_vec(), minors, ideal })
}

/// `Σ` of the tuple with form `k` removed.
pub fn sigma_without(forms: &FormTuple, k: usize) -> Result<DegeneracyLocus, GeometryError> {
    forms.row(k)?;
    let subset: Vec<usize> = (0..forms.q()).filter(|&i| i != k).collect();
    degeneracy_ideal(forms, &subset)
}

/// Outcome of the global rank check.
#[derive(Debug, Clone)]
pub struct RankVerdict {
    pub full_rank: bool,
    pub locus: DegeneracyLocus,
    /// `1 = Σ c_i · minor_i` when `full_rank`.
    pub certificate: Option<MembershipCertificate>,
}

/// Whether the forms have rank `n` at every complex point.
pub fn verify_full_rank(forms: &FormTuple) -> Result<RankVerdict, GeometryError> {
    let all: Vec<usize> = (0..forms.q()).collect();
    let locus = degeneracy_ideal(forms, &all)?;
    let certificate = unit_certificate_over(&locus.minor_polys(), forms.ring(), Budget::default())?;
    Ok(RankVerdict { full_rank: certificate.is_some(), locus, certificate })
}

/// Unit certificate indexed by position in `gens`, zeros included.
pub fn unit_certificate_over(
    gens: &[Poly],
    ring: &Ring,
    budget: Budget,
) -> Result<Option<MembershipCertificate>, GroebnerError> {
    let nonzero: Vec<usize> = (0..gens.len()).filter(|&i| !gens[i].is_zero()).collect();
    let ideal = Ideal::new(ring, nonzero.iter().map(|&i| gens[i].clone()).collect())?.with_budget(budget);
    Ok(ideal.is_unit_ideal()?.map(|c| c.reindex(|i| nonzero[i])))
}

/// Membership with the certificate indexed by position in `gens`.
pub fn membership_over(
    target: &Poly,
    gens: &[Poly],
    budget: Budget,
) -> Result<Option<MembershipCertificate>, GroebnerError> {
    let nonzero: Vec<usize> = (0..gens.len()).filter(|&i| !gens[i].is_zero()).collect();
    let ideal =
        Ideal::new(target.ring(), nonzero.iter().map(|&i| gens[i].clone()).collect())?.with_budget(budget);
    Ok(ideal.membership(target)?.map(|c| c.reindex(|i| nonzero[i])))
}

/// `L = Σ_j components[j] ∂/∂x_j` over the space variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    ring: Ring,
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(ring: &Ring, components: Vec<Poly>) -> Result<Self, GeometryError> {
        if components.len() != ring.space_dim() {
            return Err(GeometryError::Shape(format!(
                "{} components in dimension {}",
                components.len(),
                ring.space_dim()
            )));
        }
        if components.iter().any(|p| p.ring() != ring) {
            return Err(RingError::ContextMismatch.into());
        }
        Ok(Self { ring: ring.clone(), components })
    }

    pub fn parse(ring: &Ring, components: &[&str]) -> Result<Self, GeometryError> {
        let c = components.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, c)
    }

    pub fn zero(ring: &Ring) -> Self {
        Self { ring: ring.clone(), components: vec![ring.zero(); ring.space_dim()] }
    }

    /// The coordinate field `∂/∂x_j` (0-based `j`).
    pub fn coordinate(ring: &Ring, j: usize) -> Self {
        let mut v = Self::zero(ring);
        v.components[j] = ring.one();
        v
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn strings(&self) -> Vec<String> {
        self.components.iter().map(|p| p.to_string()).collect()
    }

    pub fn add(&self, other: &VectorField) -> Self {
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect();
        Self { ring: self.ring.clone(), components }
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect();
        Self { ring: self.ring.clone(), components }
    }

    pub fn scale_by(&self, h: &Poly) -> Self {
        Self { ring: self.ring.clone(), components: self.components.iter().map(|c| c * h).collect() }
    }

    pub fn embed(&self, ring: &Ring) -> Result<Self, GeometryError> {
        let c = self.components.iter().map(|p| p.embed(ring)).collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, c)
    }

    /// `L p = Σ_j L_j ∂p/∂x_j`.
    pub fn lie(&self, p: &Poly) -> Poly {
        let mut acc = self.ring.zero();
        for (c, j) in self.components.iter().zip(self.ring.space_indices()) {
            if c.is_zero() {
                continue;
            }
            let d = p.derivative(j);
            if !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        acc
    }

    pub fn iterated_lie(&self, p: &Poly, k: usize) -> Poly {
        (0..k).fold(p.clone(), |acc, _| self.lie(&acc))
    }

    pub fn max_degree(&self) -> u32 {
        self.components.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }
}

pub fn lie_derivative(l: &VectorField, p: &Poly) -> Poly {
    l.lie(p)
}

pub fn iterated_lie(l: &VectorField, p: &Poly, k: usize) -> Poly {
    l.iterated_lie(p, k)
}

/// Pairing of a form row with a field.
pub fn contract(row: &[Poly], l: &VectorField) -> Poly {
    let mut acc = l.ring.zero();
    for (a, b) in row.iter().zip(&l.components) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    acc
}

/// `df` as a row over the space variables.
pub fn exterior_derivative(f: &Poly) -> Vec<Poly> {
    f.ring().space_indices().into_iter().map(|j| f.derivative(j)).collect()
}

/// `L` with `φ_j L ≡ δ_jk` modulo `Σ`, plus the certificates.
#[derive(Debug, Clone)]
pub struct FieldOnSigma {
    pub field: VectorField,
    pub degree: u32,
    /// Certificate for `contract(φ_j, L) − δ_jk` in the generators of `Σ`, per form.
    pub certificates: Vec<MembershipCertificate>,
}

/// Searches `L` with components of degree `D, D+1, …, D+extra`, starting
/// from the largest coefficient degree of the forms.
pub fn construct_field_on_sigma(
    forms: &FormTuple,
    k: usize,
    sigma: &Ideal,
    extra: u32,
) -> Result<FieldOnSigma, GeometryError> {
    forms.row(k)?;
    let ring = forms.ring();
    let start = forms.max_degree();
    let n = forms.n();
    let mut vars = ring.space_indices();
    vars.extend(ring.indices_of_kind(VarKind::Parameter));
    let field = if sigma.is_unit_ideal()?.is_some() {
        Some((VectorField::zero(ring), start))
    } else {
        let mut found = None;
        for d in start..=start + extra {
            let constraints: Vec<LinearConstraint<'_>> = (0..forms.q())
                .map(|j| LinearConstraint {
                    terms: forms.rows[j].iter().cloned().enumerate().collect(),
                    target: if j == k { ring.one() } else { ring.zero() },
                    modulus: sigma,
                })
                .collect();
            if let Some(sol) = degree_bounded_linear_solve(ring, n, &constraints, d, &vars)? {
                found = Some((VectorField::new(ring, sol)?, d));
                break;
            }
        }
        found
    };
    let Some((field, degree)) = field else {
        return Err(GeometryError::NoSolutionAtDegree(start + extra));
    };
    let mut certificates = Vec::with_capacity(forms.q());
    for j in 0..forms.q() {
        let mut r = contract(&forms.rows[j], &field);
        if j == k {
            r = &r - &ring.one();
        }
        let cert = sigma.membership(&r)?.ok_or_else(|| {
            GeometryError::Shape(format!("internal: contraction {j} not certified modulo the locus"))
        })?;
        certificates.push(cert);
    }
    Ok(FieldOnSigma { field, degree, certificates })
}
