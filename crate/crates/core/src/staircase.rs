//! Finite representation of the transformed set
//! `F = cl(S - R^m_+)^c ∩ [lb, ub]_C` by its minimal points.
//!
//! Points of `S` are inserted one at a time. Each insertion replaces every
//! current minimal point `ℓ < z̄` by the `m` strong minimizers of the box
//! problems `P_i(ℓ, z̄)`, which are computed by fixed-point iteration of a
//! contraction with modulus `(m - 1) / α`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::cones::{interval_contains_raw, interval_contains_tol, Bounds, ConeSpec};
use crate::error::{Error, Result};
use crate::points::{pareto_min_points, Point, PointCloud};
use crate::relations::{psi_points, RelationKind};

/// Default residual tolerance for the box-problem iteration.
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-10;

/// `P_i(ℓ, z̄)`: minimize `y` subject to `y_i = z̄_i`, `y ∈ [a, b]_C`, `y >= ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxProblem {
    /// Coordinate pinned to the target level.
    pub index: usize,
    /// Current lower anchor `ℓ`.
    pub anchor: Point,
    /// Target level `z̄`, with `ℓ < z̄`.
    pub target: Point,
    /// Interval lower corner `a`.
    pub lower: Point,
    /// Interval upper corner `b`.
    pub upper: Point,
    pub cone: ConeSpec,
}

/// Fixed point together with the residual history `‖T(y_r) - y_r‖_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSolution {
    pub point: Point,
    pub residuals: Vec<f64>,
    /// Maximum number of map evaluations allowed by the contraction estimate.
    pub budget: usize,
}

fn scale_of(points: &[&Point]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.coords())
        .fold(1.0f64, |acc, c| acc.max(c.abs()))
}

impl BoxProblem {
    fn validate(&self) -> Result<()> {
        let m = self.cone.dim();
        for p in [&self.anchor, &self.target, &self.lower, &self.upper] {
            if p.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: p.dim(),
                });
            }
        }
        if self.index >= m {
            return Err(Error::IndexOutOfRange {
                index: self.index,
                len: m,
            });
        }
        if !self.anchor.lt(&self.target) {
            return Err(Error::Precondition("anchor must be strictly below target".into()));
        }
        if !self.lower.lt(&self.upper) {
            return Err(Error::Precondition(
                "interval corners must satisfy lower < upper".into(),
            ));
        }
        let slack = 1e-9 * scale_of(&[&self.lower, &self.upper]);
        for (name, p) in [("anchor", &self.anchor), ("target", &self.target)] {
            if !interval_contains_tol(&self.cone, &self.lower, &self.upper, p, slack) {
                return Err(Error::Precondition(format!(
                    "{name} {p} lies outside the cone interval"
                )));
            }
        }
        Ok(())
    }

    /// One application of the map `T`.
    fn apply(&self, y: &[f64], out: &mut [f64]) {
        let a = self.lower.coords();
        let l = self.anchor.coords();
        match self.cone {
            ConeSpec::Orthant { .. } => {
                out.copy_from_slice(l);
            }
            ConeSpec::Alpha { alpha, .. } => {
                let total: f64 = y.iter().zip(a).map(|(yj, aj)| yj - aj).sum();
                for k in 0..y.len() {
                    let others = total - (y[k] - a[k]);
                    out[k] = l[k].max(a[k] + others / alpha);
                }
            }
        }
        out[self.index] = self.target[self.index];
    }

    /// Contraction modulus of `T` in the 1-norm.
    pub fn contraction_modulus(&self) -> f64 {
        match self.cone {
            ConeSpec::Orthant { .. } => 0.0,
            ConeSpec::Alpha { alpha, dim } => (dim - 1) as f64 / alpha,
        }
    }

    /// Rounds a computed fixed point up, one ulp at a time, until every cone
    /// row holds in exact arithmetic. Coordinates only grow, so `y >= ℓ` and
    /// membership in the complement of the lower set are preserved.
    fn round_into_cone(&self, y: &mut [f64]) {
        let ConeSpec::Alpha { alpha, .. } = self.cone else {
            return;
        };
        let a = self.lower.coords();
        for _ in 0..64 {
            let mut changed = false;
            for k in 0..y.len() {
                if k == self.index {
                    continue;
                }
                let others: f64 = (0..y.len()).filter(|&j| j != k).map(|j| y[j] - a[j]).sum();
                if others > alpha * (y[k] - a[k]) {
                    y[k] = y[k].next_up();
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }
}

fn l1_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

/// Solves `P_i(ℓ, z̄)` and returns its strong minimizer.
pub fn solve_box_problem(bp: &BoxProblem, tol: f64) -> Result<Point> {
    solve_box_problem_traced(bp, tol).map(|s| s.point)
}

/// Like [`solve_box_problem`], also returning the residual history.
///
/// Iterates `y <- T(y)` from `y = z̄` until `‖T(y) - y‖_1 <= tol`. The number
/// of map evaluations is capped by the Banach estimate
/// `ceil(log(tol / r_0) / log γ) + 1`.
pub fn solve_box_problem_traced(bp: &BoxProblem, tol: f64) -> Result<BoxSolution> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    bp.validate()?;

    let mut y = bp.target.coords().to_vec();
    let mut next = vec![0.0; y.len()];
    bp.apply(&y, &mut next);
    let r0 = l1_distance(&next, &y);
    let mut residuals = vec![r0];

    let gamma = bp.contraction_modulus();
    let budget = if r0 <= tol {
        1
    } else if gamma == 0.0 {
        // `T` is constant, so its first image is already fixed.
        2
    } else {
        ((tol / r0).ln() / gamma.ln()).ceil().max(0.0) as usize + 1
    };

    while *residuals.last().unwrap() > tol {
        if residuals.len() >= budget {
            return Err(Error::NoConvergence {
                budget,
                residual: *residuals.last().unwrap(),
            });
        }
        std::mem::swap(&mut y, &mut next);
        bp.apply(&y, &mut next);
        residuals.push(l1_distance(&next, &y));
    }

    bp.round_into_cone(&mut next);
    Ok(BoxSolution {
        point: Point::from_vec_unchecked(next),
        residuals,
        budget,
    })
}

/// The transformed set of a finite source, stored as its minimal points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Staircase {
    lb: Point,
    ub: Point,
    cone: ConeSpec,
    minimal_points: PointCloud,
    source: PointCloud,
}

impl Staircase {
    pub fn lb(&self) -> &Point {
        &self.lb
    }

    pub fn ub(&self) -> &Point {
        &self.ub
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    /// Minimal points, sorted lexicographically.
    pub fn minimal_points(&self) -> &PointCloud {
        &self.minimal_points
    }

    pub fn source(&self) -> &PointCloud {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.lb.dim()
    }
}

/// Builds the staircase of `source` inside `[lb, ub]_{C^α}`.
pub fn build_staircase(source: &PointCloud, bounds: &Bounds, ub: &Point) -> Result<Staircase> {
    build_staircase_with(source, &bounds.lb, ub, bounds.cone(), DEFAULT_FIXED_POINT_TOL)
}

/// Staircase bounded by the orthant instead of `C^α`.
///
/// Diagnostic only: with the orthant the strict lower relation between
/// transformed sets no longer mirrors the strict upper relation of the sources.
pub fn build_orthant_staircase(source: &PointCloud, lb: &Point, ub: &Point) -> Result<Staircase> {
    let cone = ConeSpec::orthant(lb.dim())?;
    build_staircase_with(source, lb, ub, cone, DEFAULT_FIXED_POINT_TOL)
}

/// General construction with an explicit cone and fixed-point tolerance.
pub fn build_staircase_with(
    source: &PointCloud,
    lb: &Point,
    ub: &Point,
    cone: ConeSpec,
    tol: f64,
) -> Result<Staircase> {
    let m = cone.dim();
    for p in [lb, ub] {
        if p.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: p.dim(),
            });
        }
    }
    if source.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: source.dim(),
        });
    }
    for (index, z) in source.iter().enumerate() {
        if !interval_contains_raw(&cone, lb, ub, z, true) {
            return Err(Error::OutsideBounds { index });
        }
    }

    let slack = 1e-9 * scale_of(&[lb, ub]);
    let mut current = vec![lb.clone()];
    for (k, target) in source.iter().enumerate() {
        let processed = &source.points()[..=k];
        let (below, kept): (Vec<Point>, Vec<Point>) =
            current.into_iter().partition(|l| l.lt(target));

        let mut candidates = Vec::with_capacity(below.len() * m + kept.len());
        for anchor in below {
            for index in 0..m {
                let bp = BoxProblem {
                    index,
                    anchor: anchor.clone(),
                    target: target.clone(),
                    lower: lb.clone(),
                    upper: ub.clone(),
                    cone,
                };
                candidates.push(solve_box_problem(&bp, tol)?);
            }
        }
        candidates.extend(kept);
        candidates.retain(|c| {
            psi_points(processed, c) >= 0.0 && interval_contains_tol(&cone, lb, ub, c, slack)
        });
        current = pareto_min_points(&candidates);
    }

    current.sort_by(lex_cmp);
    Ok(Staircase {
        lb: lb.clone(),
        ub: ub.clone(),
        cone,
        minimal_points: PointCloud::new(current)?,
        source: source.clone(),
    })
}

pub(crate) fn lex_cmp(a: &Point, b: &Point) -> Ordering {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Membership in the transformed set: `psi_S(y) >= 0` and `y ∈ [lb, ub]_C`.
pub fn staircase_contains(st: &Staircase, y: &Point) -> Result<bool> {
    st.lb.check_dim(y)?;
    Ok(psi_points(st.source.points(), y) >= 0.0
        && interval_contains_raw(&st.cone, &st.lb, &st.ub, y, false))
}

/// Lower-type relation between two transformed sets, decided on their
/// minimal points.
///
/// Both staircases must share `lb` and the cone; their upper corners may
/// differ.
pub fn staircase_prec(kind: RelationKind, s1: &Staircase, s2: &Staircase) -> Result<bool> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    if s1.lb != s2.lb || s1.cone != s2.cone {
        return Err(Error::MismatchedBounds);
    }
    let (q, p) = (s1.minimal_points.points(), s2.minimal_points.points());
    match kind {
        RelationKind::StrictLower => Ok(p.iter().all(|t| q.iter().any(|s| s.lt(t)))),
        RelationKind::Lower => Ok(p.iter().all(|t| q.iter().any(|s| s.le(t)))),
        other => Err(Error::InvalidArgument(format!(
            "staircases compare only under lower-type relations, got {other}"
        ))),
    }
}
