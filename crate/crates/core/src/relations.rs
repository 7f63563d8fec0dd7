//! The scalarizing functional `psi_A` and the lower/upper set relations on
//! finite point clouds.
//!
//! `psi_A(y) = min_{a in A} max_j (y_j - a_j)`. Its sign decides membership
//! in the lower set `A - R^m_+` (`psi <= 0`) and in the closure of its
//! complement (`psi >= 0`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{Point, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `A ≺^l B`: `B ⊆ A + int R^m_+`.
    StrictLower,
    /// `A ⪯^l B`: `B ⊆ A + R^m_+`.
    Lower,
    /// `A ≺^u B`: `A ⊆ B - int R^m_+`.
    StrictUpper,
    /// `A ⪯^u B`: `A ⊆ B - R^m_+`.
    Upper,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::StrictLower,
        RelationKind::Lower,
        RelationKind::StrictUpper,
        RelationKind::Upper,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::StrictLower => "strict_lower",
            RelationKind::Lower => "lower",
            RelationKind::StrictUpper => "strict_upper",
            RelationKind::Upper => "upper",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, RelationKind::StrictLower | RelationKind::StrictUpper)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown relation kind `{s}`")))
    }
}

/// Position of a point relative to the lower set `A - R^m_+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerSetPosition {
    /// `psi_A(y) < 0`: `y` lies in `A - int R^m_+`.
    InsideLowerSet,
    /// `psi_A(y) = 0`.
    Boundary,
    /// `psi_A(y) > 0`: `y` lies outside `A - R^m_+`.
    OutsideLowerSet,
}

impl LowerSetPosition {
    /// Membership in `cl(A - R^m_+)^c = (A - int R^m_+)^c`.
    pub fn in_complement_closure(self) -> bool {
        !matches!(self, LowerSetPosition::InsideLowerSet)
    }
}

/// `max_j (y_j - a_j)`, the functional for the singleton `{a}`.
#[inline]
pub(crate) fn max_gap(y: &Point, a: &Point) -> f64 {
    y.coords()
        .iter()
        .zip(a.coords())
        .map(|(yj, aj)| yj - aj)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Unchecked `psi_A(y)` over a slice of points.
pub(crate) fn psi_points(a_set: &[Point], y: &Point) -> f64 {
    a_set
        .iter()
        .map(|a| max_gap(y, a))
        .fold(f64::INFINITY, f64::min)
}

/// `psi_A(y) = min_{a in A} max_j (y_j - a_j)`.
pub fn psi(a_set: &PointCloud, y: &Point) -> Result<f64> {
    a_set.check_point(y)?;
    Ok(psi_points(a_set.points(), y))
}

/// Evaluates one of the four set relations by its definition.
pub fn holds(kind: RelationKind, a: &PointCloud, b: &PointCloud) -> Result<bool> {
    a.check_cloud(b)?;
    let (a, b) = (a.points(), b.points());
    Ok(match kind {
        RelationKind::StrictUpper => a.iter().all(|x| b.iter().any(|y| x.lt(y))),
        RelationKind::Upper => a.iter().all(|x| b.iter().any(|y| x.le(y))),
        RelationKind::StrictLower => b.iter().all(|y| a.iter().any(|x| x.lt(y))),
        RelationKind::Lower => b.iter().all(|y| a.iter().any(|x| x.le(y))),
    })
}

/// Margin `eps = -max_{a in A} psi_B(a)` certifying `A ≺^u B`.
///
/// Returns `Some(eps)` exactly when `eps > 0`, which happens exactly when
/// `A ≺^u B`; then `A + eps e ⊆ B - R^m_+`.
pub fn certify_strict_upper(a: &PointCloud, b: &PointCloud) -> Result<Option<f64>> {
    a.check_cloud(b)?;
    let worst = a
        .iter()
        .map(|x| psi_points(b.points(), x))
        .fold(f64::NEG_INFINITY, f64::max);
    let eps = -worst;
    Ok((eps > 0.0).then_some(eps))
}

/// Classifies `y` by the sign of `psi_A(y)`, compared exactly against zero.
pub fn complement_closure_position(a: &PointCloud, y: &Point) -> Result<LowerSetPosition> {
    let v = psi(a, y)?;
    Ok(if v < 0.0 {
        LowerSetPosition::InsideLowerSet
    } else if v > 0.0 {
        LowerSetPosition::OutsideLowerSet
    } else {
        LowerSetPosition::Boundary
    })
}
