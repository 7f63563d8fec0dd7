//! The polyhedral cones `C^α = {y | Σ_{j≠k} y_j <= α y_k for all k}`,
//! cone intervals, and fitting of a proper lower bound `(lb, α)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{Point, PointCloud};

/// Ordering cone used to bound the transformed sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConeSpec {
    /// The nonnegative orthant. Only valid in diagnostic contexts: it is not
    /// contained in `int R^m_+ ∪ {0}` and breaks the strict-relation transfer.
    Orthant { dim: usize },
    /// `C^α` with `α > m - 1`.
    Alpha { alpha: f64, dim: usize },
}

impl ConeSpec {
    pub fn alpha(alpha: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !alpha.is_finite() || alpha <= (dim - 1) as f64 {
            return Err(Error::InvalidCone(format!(
                "alpha must be finite and exceed m - 1 = {}, got {alpha}",
                dim - 1
            )));
        }
        Ok(ConeSpec::Alpha { alpha, dim })
    }

    pub fn orthant(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(ConeSpec::Orthant { dim })
    }

    pub fn dim(&self) -> usize {
        match *self {
            ConeSpec::Orthant { dim } | ConeSpec::Alpha { dim, .. } => dim,
        }
    }

    pub fn alpha_value(&self) -> Option<f64> {
        match *self {
            ConeSpec::Alpha { alpha, .. } => Some(alpha),
            ConeSpec::Orthant { .. } => None,
        }
    }

    pub fn is_orthant(&self) -> bool {
        matches!(self, ConeSpec::Orthant { .. })
    }

    /// Rejects the orthant in solver paths.
    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha_value().ok_or_else(|| {
            Error::InvalidCone("the orthant is only allowed in diagnostic relation checks".into())
        })
    }

    fn check(&self, y: &Point) -> Result<()> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: y.dim(),
            });
        }
        Ok(())
    }

    /// Membership of raw coordinates, without a dimension check.
    pub(crate) fn contains_raw(&self, y: &[f64], strict: bool) -> bool {
        match *self {
            ConeSpec::Orthant { .. } => {
                if strict {
                    y.iter().all(|&c| c > 0.0)
                } else {
                    y.iter().all(|&c| c >= 0.0)
                }
            }
            ConeSpec::Alpha { alpha, .. } => (0..y.len()).all(|k| {
                let others: f64 = y
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, c)| c)
                    .sum();
                let rhs = alpha * y[k];
                if strict {
                    others < rhs
                } else {
                    others <= rhs
                }
            }),
        }
    }
}

/// `y ∈ C` (or `y ∈ int C` when `strict`).
pub fn cone_contains(cone: &ConeSpec, y: &Point, strict: bool) -> Result<bool> {
    cone.check(y)?;
    Ok(cone.contains_raw(y.coords(), strict))
}

/// Membership in the cone interval `[lo, hi]_C = ({lo} + C) ∩ ({hi} - R^m_+)`,
/// or in `(lo, hi)_C = ({lo} + int C) ∩ ({hi} - int R^m_+)` when `open`.
pub fn interval_contains(
    cone: &ConeSpec,
    lo: &Point,
    hi: &Point,
    y: &Point,
    open: bool,
) -> Result<bool> {
    cone.check(lo)?;
    cone.check(hi)?;
    cone.check(y)?;
    Ok(interval_contains_raw(cone, lo, hi, y, open))
}

pub(crate) fn interval_contains_raw(
    cone: &ConeSpec,
    lo: &Point,
    hi: &Point,
    y: &Point,
    open: bool,
) -> bool {
    let below_hi = if open { y.lt(hi) } else { y.le(hi) };
    below_hi && cone.contains_raw(y.sub(lo).coords(), open)
}

/// Closed-interval membership with an absolute slack `tol` on every
/// inequality, for points produced by the fixed-point solver.
pub(crate) fn interval_contains_tol(
    cone: &ConeSpec,
    lo: &Point,
    hi: &Point,
    y: &Point,
    tol: f64,
) -> bool {
    if !y.coords().iter().zip(hi.coords()).all(|(a, b)| *a <= b + tol) {
        return false;
    }
    let d = y.sub(lo);
    let d = d.coords();
    match *cone {
        ConeSpec::Orthant { .. } => d.iter().all(|&c| c >= -tol),
        ConeSpec::Alpha { alpha, .. } => (0..d.len()).all(|k| {
            let others: f64 = d
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, c)| c)
                .sum();
            others <= alpha * d[k] + tol
        }),
    }
}

/// A proper lower bound: every image point lies in `{lb} + int C^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lb: Point,
    pub alpha: f64,
    /// Shift `δ` used when `lb` was fitted.
    pub margin: f64,
}

impl Bounds {
    pub fn new(lb: Point, alpha: f64, margin: f64) -> Result<Self> {
        ConeSpec::alpha(alpha, lb.dim())?;
        if !(margin.is_finite() && margin > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "margin must be positive, got {margin}"
            )));
        }
        Ok(Bounds { lb, alpha, margin })
    }

    pub fn dim(&self) -> usize {
        self.lb.dim()
    }

    pub fn cone(&self) -> ConeSpec {
        ConeSpec::Alpha {
            alpha: self.alpha,
            dim: self.lb.dim(),
        }
    }

    /// True iff every point lies in `{lb} + int C^α`.
    pub fn properly_bounds(&self, points: &PointCloud) -> bool {
        let cone = self.cone();
        points
            .iter()
            .all(|y| y.dim() == self.dim() && cone.contains_raw(y.sub(&self.lb).coords(), true))
    }
}

/// Smallest-ratio cone opening for strictly positive points, plus one.
///
/// Returns `1 + max_{y, i} max{m, Σ_{j≠i} y_j / y_i}`, so every input point
/// lies in the interior of the returned `C^α`.
pub fn fit_alpha(shifted_points: &PointCloud) -> Result<f64> {
    let m = shifted_points.dim();
    let mut best = m as f64;
    for (pi, y) in shifted_points.iter().enumerate() {
        if let Some(index) = y.coords().iter().position(|&c| c <= 0.0) {
            return Err(Error::NonPositiveShift { point: pi, index });
        }
        for (i, &yi) in y.coords().iter().enumerate() {
            let others: f64 = y
                .coords()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c)
                .sum();
            best = best.max(others / yi);
        }
    }
    Ok(best + 1.0)
}

/// Fits `lb_j = min_y y_j - δ` and `α = fit_alpha(points - lb)`.
pub fn fit_lower_bound(image_points: &PointCloud, delta: f64) -> Result<Bounds> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let lb = image_points.component_min().shifted(-delta);
    let shifted = PointCloud::new(image_points.iter().map(|y| y.sub(&lb)).collect())?;
    let alpha = fit_alpha(&shifted)?;
    Bounds::new(lb, alpha, delta)
}
