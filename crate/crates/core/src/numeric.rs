//! Floating-point views of form tuples: evaluation on grids and SVD rank.
//!
//! Nothing here is authoritative; exact verdicts live in the other modules.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};

use crate::geometry::FormTuple;
use crate::grid::{GridError, GridSpec};
use crate::ring::{Rational, VarKind};

/// Threshold for treating a singular value as positive.
pub const RANK_TOL: f64 = 1e-9;
/// Threshold for treating a float as zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledMatrix {
    /// Values of all ring variables.
    pub point: Vec<Rational>,
    /// `q×n` entries, row-major.
    pub entries: Vec<Vec<f64>>,
    /// `n` values, descending, zero-padded when `q < n`.
    pub singular_values: Vec<f64>,
}

impl SampledMatrix {
    pub fn min_singular(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn singular_values(entries: &[Vec<f64>], n: usize) -> Vec<f64> {
    let q = entries.len();
    let mut sv: Vec<f64> = if q == 0 || n == 0 {
        Vec::new()
    } else {
        let m = DMatrix::from_fn(q, n, |i, j| entries[i][j]);
        m.singular_values().iter().copied().collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.resize(n, 0.0);
    sv
}

/// Evaluates the coefficient matrix at each point. A point lists either the
/// space coordinates only (other variables set to 0) or every ring variable.
pub fn evaluate_forms(forms: &FormTuple, points: &[Vec<Rational>]) -> Result<Vec<SampledMatrix>, GridError> {
    let ring = forms.ring();
    let space = ring.space_indices();
    points
        .iter()
        .map(|p| {
            let full = if p.len() == ring.nvars() {
                p.clone()
            } else if p.len() == space.len() {
                let mut full = vec![Rational::zero(); ring.nvars()];
                for (x, &i) in p.iter().zip(&space) {
                    full[i] = x.clone();
                }
                full
            } else {
                return Err(GridError::Dimension { grid: p.len(), ring: space.len() });
            };
            let entries: Vec<Vec<f64>> =
                forms.rows().iter().map(|row| row.iter().map(|c| to_f64(&c.eval(&full))).collect()).collect();
            let singular_values = singular_values(&entries, forms.n());
            Ok(SampledMatrix { point: full, entries, singular_values })
        })
        .collect()
}

/// Grid points, crossed with `t_samples` equally spaced values in `[0, 1]`
/// for every homotopy variable of the ring.
pub fn sample_points(forms: &FormTuple, grid: &GridSpec, t_samples: Option<usize>) -> Result<Vec<Vec<Rational>>, GridError> {
    let ring = forms.ring();
    let space = ring.space_indices();
    if space.len() != grid.dim() {
        return Err(GridError::Dimension { grid: grid.dim(), ring: space.len() });
    }
    let ts = ring.indices_of_kind(VarKind::Homotopy);
    let tvals: Vec<Rational> = match (t_samples, ts.is_empty()) {
        (Some(s), false) => {
            let s = s.max(2) as i64;
            (0..s).map(|j| Rational::new(j.into(), (s - 1).into())).collect()
        }
        _ => vec![Rational::zero()],
    };
    let mut out = Vec::new();
    for x in grid.points() {
        for t in &tvals {
            let mut full = vec![Rational::zero(); ring.nvars()];
            for (v, &i) in x.iter().zip(&space) {
                full[i] = v.clone();
            }
            for &i in &ts {
                full[i] = t.clone();
            }
            out.push(full);
        }
    }
    Ok(out)
}

/// Smallest `n`-th singular value over the samples, with its point.
pub fn min_singular_sample(
    forms: &FormTuple,
    grid: &GridSpec,
    t_samples: Option<usize>,
) -> Result<SampledMatrix, GridError> {
    let samples = evaluate_forms(forms, &sample_points(forms, grid, t_samples)?)?;
    Ok(samples
        .into_iter()
        .reduce(|a, b| if b.min_singular() < a.min_singular() { b } else { a })
        .expect("grids have at least one point"))
}

pub fn min_singular_over_grid(forms: &FormTuple, grid: &GridSpec, t_samples: Option<usize>) -> Result<f64, GridError> {
    Ok(min_singular_sample(forms, grid, t_samples)?.min_singular())
}

/// One line per sample: coordinates, then singular values.
pub fn write_csv<W: Write>(forms: &FormTuple, samples: &[SampledMatrix], mut out: W) -> io::Result<()> {
    let names = forms.ring().names();
    let header: Vec<String> =
        names.iter().map(|s| s.to_string()).chain((1..=forms.n()).map(|i| format!("sigma{i}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for s in samples {
        let cells: Vec<String> = s
            .point
            .iter()
            .map(|r| to_f64(r).to_string())
            .chain(s.singular_values.iter().map(|v| format!("{v:e}")))
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
