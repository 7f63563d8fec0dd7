//! Vectors in objective space, finite point clouds and componentwise dominance.
//!
//! All comparisons are exact. Points produced inside the solver are built
//! from input coordinates by copying or by a small number of arithmetic
//! steps, and the downstream exactness results rely on strict inequalities
//! not being blurred by a tolerance.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite vector in `R^m`, `m >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Point(coords))
    }

    /// Builds a point from coordinates already known to be finite.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    /// The all-one vector `e`.
    pub fn ones(dim: usize) -> Self {
        Point(vec![1.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `self + t * e`.
    pub fn shifted(&self, t: f64) -> Point {
        Point(self.0.iter().map(|c| c + t).collect())
    }

    /// `self - other`; dimensions must agree.
    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise `self < other`, assuming equal dimension.
    pub fn lt(&self, other: &Point) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a < b)
    }

    /// Componentwise `self <= other`, assuming equal dimension.
    pub fn le(&self, other: &Point) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self <= other` and `self != other`.
    pub fn dominates(&self, other: &Point) -> bool {
        self.le(other) && self != other
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A nonempty finite list of points of uniform dimension.
///
/// Duplicates are allowed; the Pareto filters remove them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        Ok(PointCloud { points })
    }

    /// Convenience constructor from raw coordinate rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.as_ref().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        PointCloud::new(points)
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn check_point(&self, y: &Point) -> Result<()> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: y.dim(),
            });
        }
        Ok(())
    }

    pub fn check_cloud(&self, other: &PointCloud) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Componentwise maximum over the cloud.
    pub fn component_max(&self) -> Point {
        fold_components(&self.points, f64::max)
    }

    /// Componentwise minimum over the cloud.
    pub fn component_min(&self) -> Point {
        fold_components(&self.points, f64::min)
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

impl TryFrom<Vec<Point>> for PointCloud {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        PointCloud::new(points)
    }
}

impl From<PointCloud> for Vec<Point> {
    fn from(c: PointCloud) -> Vec<Point> {
        c.points
    }
}

fn fold_components(points: &[Point], op: fn(f64, f64) -> f64) -> Point {
    let mut acc = points[0].0.clone();
    for p in &points[1..] {
        for (a, c) in acc.iter_mut().zip(&p.0) {
            *a = op(*a, *c);
        }
    }
    Point(acc)
}

/// True iff `a_j < b_j` for every coordinate.
pub fn strictly_less(a: &Point, b: &Point) -> Result<bool> {
    a.check_dim(b)?;
    Ok(a.lt(b))
}

/// True iff `a_j <= b_j` for every coordinate.
pub fn weakly_less(a: &Point, b: &Point) -> Result<bool> {
    a.check_dim(b)?;
    Ok(a.le(b))
}

/// Efficient (minimal) points of a cloud with respect to `R^m_+`.
///
/// Keeps `a` iff no `b` in the cloud has `b <= a, b != a`. The output is
/// duplicate-free and follows the order of first occurrence.
pub fn pareto_min(cloud: &PointCloud) -> PointCloud {
    filter_front(cloud.points(), |b, a| b.dominates(a))
}

/// Maximal points of a cloud with respect to `R^m_+`, the generators of the
/// lower set `A - R^m_+`. Same ordering rules as [`pareto_min`].
pub fn pareto_max(cloud: &PointCloud) -> PointCloud {
    filter_front(cloud.points(), |b, a| a.dominates(b))
}

/// Slice version of [`pareto_min`]; an empty input gives an empty output.
pub(crate) fn pareto_min_points(points: &[Point]) -> Vec<Point> {
    if points.is_empty() {
        return Vec::new();
    }
    filter_front(points, |b, a| b.dominates(a)).into_points()
}

fn filter_front(points: &[Point], beats: impl Fn(&Point, &Point) -> bool) -> PointCloud {
    let mut kept: Vec<Point> = Vec::new();
    for (i, a) in points.iter().enumerate() {
        if points[..i].contains(a) {
            continue;
        }
        if points.iter().any(|b| beats(b, a)) {
            continue;
        }
        kept.push(a.clone());
    }
    PointCloud { points: kept }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn cloud(rows: &[&[f64]]) -> PointCloud {
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn strictly_less_examples() {
        assert!(strictly_less(&p(&[0.0, 0.0]), &p(&[1.0, 1.0])).unwrap());
        assert!(!strictly_less(&p(&[0.0, 2.0]), &p(&[1.0, 1.0])).unwrap());
        assert!(!strictly_less(&p(&[1.0, 3.0]), &p(&[1.0, 4.0])).unwrap());
    }

    #[test]
    fn strictly_less_dimension_mismatch() {
        let err = strictly_less(&p(&[0.0]), &p(&[1.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn point_rejects_non_finite_and_empty() {
        assert_eq!(Point::new(vec![]), Err(Error::ZeroDimension));
        assert_eq!(
            Point::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert_eq!(
            Point::new(vec![f64::INFINITY]),
            Err(Error::NonFinite { index: 0 })
        );
    }

    #[test]
    fn cloud_rejects_empty_and_ragged() {
        assert_eq!(PointCloud::new(vec![]), Err(Error::EmptySet));
        assert!(matches!(
            PointCloud::new(vec![p(&[1.0]), p(&[1.0, 2.0])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pareto_min_examples() {
        let incomparable = cloud(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(pareto_min(&incomparable), incomparable);

        let dominated = cloud(&[&[0.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(pareto_min(&dominated), cloud(&[&[0.0, 0.0]]));

        let mixed = cloud(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0], &[2.0, 3.0]]);
        assert_eq!(
            pareto_min(&mixed),
            cloud(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0]])
        );
    }

    #[test]
    fn pareto_min_removes_duplicates_keeping_first() {
        let dup = cloud(&[&[2.0, 2.0], &[1.0, 3.0], &[2.0, 2.0], &[1.0, 3.0]]);
        assert_eq!(pareto_min(&dup), cloud(&[&[2.0, 2.0], &[1.0, 3.0]]));
    }

    #[test]
    fn pareto_max_keeps_upper_front() {
        let c = cloud(&[&[4.0, 4.0], &[0.0, 0.0]]);
        assert_eq!(pareto_max(&c), cloud(&[&[4.0, 4.0]]));
    }

    #[test]
    fn component_extremes() {
        let c = cloud(&[&[1.0, 3.0], &[3.0, 1.0]]);
        assert_eq!(c.component_max(), p(&[3.0, 3.0]));
        assert_eq!(c.component_min(), p(&[1.0, 1.0]));
    }
}
