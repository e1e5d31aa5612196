//! Rational sample grids on polydiscs and grid sup norms.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{format_rational, parse_rational, rat, Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid needs at least 2 samples per axis, got {0}")]
    TooFewSamples(usize),
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("grid has {grid} axes but the ring has {ring} space variables")]
    Dimension { grid: usize, ring: usize },
    #[error("polynomial depends on non-space variable {0}")]
    NonSpaceVariable(String),
    #[error("cannot parse grid spec: {0}")]
    Parse(String),
}

/// Closed polydisc `Π [c_i − r_i, c_i + r_i]` sampled at `samples` equally
/// spaced rational points per axis, endpoints included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    center: Vec<Rational>,
    radius: Vec<Rational>,
    samples: usize,
}

#[derive(Serialize, Deserialize)]
struct GridSpecRepr {
    center: Vec<String>,
    radius: Vec<String>,
    samples: usize,
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GridSpecRepr {
            center: self.center.iter().map(format_rational).collect(),
            radius: self.radius.iter().map(format_rational).collect(),
            samples: self.samples,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = GridSpecRepr::deserialize(d)?;
        let parse = |v: &[String]| -> Result<Vec<Rational>, D::Error> {
            v.iter()
                .map(|s| parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        };
        GridSpec::new(parse(&r.center)?, parse(&r.radius)?, r.samples).map_err(serde::de::Error::custom)
    }
}

impl GridSpec {
    pub fn new(center: Vec<Rational>, radius: Vec<Rational>, samples: usize) -> Result<Self, GridError> {
        if samples < 2 {
            return Err(GridError::TooFewSamples(samples));
        }
        if center.len() != radius.len() {
            return Err(GridError::Dimension { grid: center.len(), ring: radius.len() });
        }
        if radius.iter().any(|r| !r.is_positive()) {
            return Err(GridError::NonPositiveRadius);
        }
        Ok(Self { center, radius, samples })
    }

    /// `[−1, 1]^n` with the given number of samples per axis.
    pub fn unit(n: usize, samples: usize) -> Result<Self, GridError> {
        Self::new(vec![Rational::zero(); n], vec![rat(1); n], samples)
    }

    /// Parses `center,radius,samples`, applied to every one of `n` axes.
    pub fn parse_uniform(text: &str, n: usize) -> Result<Self, GridError> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [c, r, s] = parts.as_slice() else {
            return Err(GridError::Parse(format!("expected center,radius,samples in {text:?}")));
        };
        let c = parse_rational(c).ok_or_else(|| GridError::Parse(format!("bad center {c:?}")))?;
        let r = parse_rational(r).ok_or_else(|| GridError::Parse(format!("bad radius {r:?}")))?;
        let s: usize = s.parse().map_err(|_| GridError::Parse(format!("bad sample count {s:?}")))?;
        Self::new(vec![c; n], vec![r; n], s)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn center(&self) -> &[Rational] {
        &self.center
    }

    pub fn radius(&self) -> &[Rational] {
        &self.radius
    }

    /// Sample values along one axis.
    pub fn axis(&self, i: usize) -> Vec<Rational> {
        let s = self.samples as i64;
        (0..s)
            .map(|j| &self.center[i] + &self.radius[i] * Rational::new((2 * j - (s - 1)).into(), (s - 1).into()))
            .collect()
    }

    /// All grid points, last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|i| self.axis(i)).multi_cartesian_product().collect()
    }

    /// Full ring points for `p`: space coordinates from the grid, every
    /// other variable must be absent from `p`.
    pub fn ring_points(&self, p: &Poly) -> Result<Vec<Vec<Rational>>, GridError> {
        let ring = p.ring();
        let space = ring.space_indices();
        if space.len() != self.dim() {
            return Err(GridError::Dimension { grid: self.dim(), ring: space.len() });
        }
        if let Some(v) = p.support_vars().into_iter().find(|v| !space.contains(v)) {
            return Err(GridError::NonSpaceVariable(ring.vars()[v].name.clone()));
        }
        Ok(self
            .points()
            .into_iter()
            .map(|pt| {
                let mut full = vec![Rational::zero(); ring.nvars()];
                for (x, &j) in pt.into_iter().zip(&space) {
                    full[j] = x;
                }
                full
            })
            .collect())
    }
}

/// `max |p|` over the grid points, exactly. A lower bound for the sup over
/// the polydisc.
pub fn sup_norm(p: &Poly, grid: &GridSpec) -> Result<Rational, GridError> {
    if p.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(grid.ring_points(p)?.iter().map(|x| p.eval(x).abs()).max().unwrap_or_else(Rational::zero))
}

/// Sum of the component sup norms of a vector of polynomials.
pub fn vector_sup_norm(v: &[Poly], grid: &GridSpec) -> Result<Rational, GridError> {
    v.iter().try_fold(Rational::zero(), |acc, p| Ok(acc + sup_norm(p, grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    #[test]
    fn sup_norm_examples() {
        let r = Ring::affine(1);
        let k3 = GridSpec::unit(1, 3).unwrap();
        assert_eq!(sup_norm(&r.var(0), &k3).unwrap(), rat(1));
        let k5 = GridSpec::unit(1, 5).unwrap();
        assert_eq!(sup_norm(&r.parse("x1^2 - 1").unwrap(), &k5).unwrap(), rat(1));
        assert_eq!(sup_norm(&r.zero(), &k5).unwrap(), rat(0));
    }

    #[test]
    fn grid_shape() {
        let k = GridSpec::unit(2, 9).unwrap();
        assert_eq!(k.points().len(), 81);
        assert_eq!(k.axis(0)[4], rat(0));
        assert!(GridSpec::unit(1, 1).is_err());
        let k = GridSpec::parse_uniform("1/2, 2, 3", 2).unwrap();
        assert_eq!(k.axis(1), vec![rat(-3) / rat(2), rat(1) / rat(2), rat(5) / rat(2)]);
    }

    #[test]
    fn rejects_foreign_variables() {
        let r = Ring::affine(1).adjoin(&[crate::ring::Variable::homotopy("t")]).unwrap();
        let k = GridSpec::unit(1, 3).unwrap();
        assert!(matches!(sup_norm(&r.parse("x1*t").unwrap(), &k), Err(GridError::NonSpaceVariable(_))));
    }
}
