//! Uncertain multiobjective instances: decision space `Ω`, uncertainty set
//! `𝒰`, objective `f`, and the derived maps `F_𝒰(x)`, `ub(x)` and `F(x)`.

use serde::{Deserialize, Serialize};

use crate::cones::{fit_lower_bound, Bounds, ConeSpec};
use crate::error::{Error, Result};
use crate::points::{pareto_max, Point, PointCloud};
use crate::staircase::{build_staircase_with, Staircase, DEFAULT_FIXED_POINT_TOL};

/// Largest number of points a grid space may materialize to.
pub const MAX_MATERIALIZED_POINTS: usize = 1 << 22;

/// A finite space, given explicitly or as a uniform lattice over a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Explicit {
        points: Vec<Vec<f64>>,
    },
    /// Lattice with `steps[j] + 1` values on axis `j`, both corners included.
    Grid {
        lower: Vec<f64>,
        upper: Vec<f64>,
        steps: Vec<usize>,
    },
}

impl SpaceSpec {
    pub fn is_explicit(&self) -> bool {
        matches!(self, SpaceSpec::Explicit { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpaceSpec::Explicit { .. } => "explicit",
            SpaceSpec::Grid { .. } => "grid",
        }
    }

    fn size_hint(&self) -> Option<usize> {
        match self {
            SpaceSpec::Explicit { points } => Some(points.len()),
            SpaceSpec::Grid { steps, .. } => steps
                .iter()
                .try_fold(1usize, |acc, s| acc.checked_mul(s.checked_add(1)?)),
        }
    }

    fn validate(&self, path: &str, dim: usize, issues: &mut Vec<String>) {
        match self {
            SpaceSpec::Explicit { points } => {
                if points.is_empty() {
                    issues.push(format!("{path}.points: must be nonempty"));
                }
                for (i, p) in points.iter().enumerate() {
                    check_vector(&format!("{path}.points[{i}]"), p, dim, issues);
                }
            }
            SpaceSpec::Grid {
                lower,
                upper,
                steps,
            } => {
                check_vector(&format!("{path}.lower"), lower, dim, issues);
                check_vector(&format!("{path}.upper"), upper, dim, issues);
                if steps.len() != dim {
                    issues.push(format!(
                        "{path}.steps: expected {dim} entries, found {}",
                        steps.len()
                    ));
                }
                for (j, s) in steps.iter().enumerate() {
                    if *s < 1 {
                        issues.push(format!("{path}.steps[{j}]: must be at least 1"));
                    }
                }
                for (j, (lo, hi)) in lower.iter().zip(upper).enumerate() {
                    if lo > hi {
                        issues.push(format!("{path}: lower[{j}] exceeds upper[{j}]"));
                    }
                }
                match self.size_hint() {
                    Some(n) if n <= MAX_MATERIALIZED_POINTS => {}
                    _ => issues.push(format!(
                        "{path}: grid exceeds {MAX_MATERIALIZED_POINTS} points"
                    )),
                }
            }
        }
    }

    /// All points of the space in a fixed order (first axis slowest).
    pub fn materialize(&self) -> Vec<Vec<f64>> {
        match self {
            SpaceSpec::Explicit { points } => points.clone(),
            SpaceSpec::Grid {
                lower,
                upper,
                steps,
            } => grid_points(lower, upper, steps),
        }
    }

    /// The same space with every grid step count multiplied by `factor`.
    /// Explicit spaces are returned unchanged.
    pub fn refined(&self, factor: usize) -> SpaceSpec {
        match self {
            SpaceSpec::Explicit { .. } => self.clone(),
            SpaceSpec::Grid {
                lower,
                upper,
                steps,
            } => SpaceSpec::Grid {
                lower: lower.clone(),
                upper: upper.clone(),
                steps: steps.iter().map(|s| s * factor.max(1)).collect(),
            },
        }
    }
}

fn axis_value(lo: f64, hi: f64, i: usize, steps: usize) -> f64 {
    if i == steps {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / steps as f64)
    }
}

fn grid_points(lower: &[f64], upper: &[f64], steps: &[usize]) -> Vec<Vec<f64>> {
    let dim = lower.len();
    let mut idx = vec![0usize; dim];
    let mut out = Vec::new();
    loop {
        out.push(
            (0..dim)
                .map(|j| axis_value(lower[j], upper[j], idx[j], steps[j]))
                .collect(),
        );
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if idx[axis] < steps[axis] {
                idx[axis] += 1;
                break;
            }
            idx[axis] = 0;
        }
    }
}

fn check_vector(path: &str, v: &[f64], dim: usize, issues: &mut Vec<String>) {
    if v.len() != dim {
        issues.push(format!("{path}: expected {dim} entries, found {}", v.len()));
    }
    if let Some(j) = v.iter().position(|x| !x.is_finite()) {
        issues.push(format!("{path}[{j}]: not a finite number"));
    }
}

/// One objective `f_j(x, u) = xᵀ Q u + cᵀ x + dᵀ u + e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearTerm {
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub e: f64,
}

impl BilinearTerm {
    pub fn eval(&self, x: &[f64], u: &[f64]) -> f64 {
        let quad: f64 = self
            .q
            .iter()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(u).map(|(q, uj)| q * uj).sum::<f64>())
            .sum();
        let lin_x: f64 = self.c.iter().zip(x).map(|(a, b)| a * b).sum();
        let lin_u: f64 = self.d.iter().zip(u).map(|(a, b)| a * b).sum();
        quad + lin_x + lin_u + self.e
    }

    fn validate(&self, path: &str, n: usize, k: usize, issues: &mut Vec<String>) {
        if self.q.len() != n {
            issues.push(format!(
                "{path}.Q: expected {n} rows, found {}",
                self.q.len()
            ));
        }
        for (r, row) in self.q.iter().enumerate() {
            check_vector(&format!("{path}.Q[{r}]"), row, k, issues);
        }
        check_vector(&format!("{path}.c"), &self.c, n, issues);
        check_vector(&format!("{path}.d"), &self.d, k, issues);
        if !self.e.is_finite() {
            issues.push(format!("{path}.e: not a finite number"));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// `values[x_index][u_index]` is the objective vector; needs explicit spaces.
    Table { values: Vec<Vec<Vec<f64>>> },
    Bilinear { terms: Vec<BilinearTerm> },
    /// Bilinear objectives where `f_j` reads only block `j` of `u`, and `𝒰`
    /// is the product of its block projections.
    ObjectiveWise {
        blocks: Vec<usize>,
        terms: Vec<BilinearTerm>,
    },
}

/// The on-disk description of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub omega: SpaceSpec,
    pub uncertainty: SpaceSpec,
    pub objective: ObjectiveSpec,
}

impl InstanceSpec {
    /// Every violated invariant, each prefixed with its field path.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for (field, v) in [("n", self.n), ("m", self.m), ("k", self.k)] {
            if v == 0 {
                issues.push(format!("{field}: must be at least 1"));
            }
        }
        self.omega.validate("omega", self.n, &mut issues);
        self.uncertainty
            .validate("uncertainty", self.k, &mut issues);

        match &self.objective {
            ObjectiveSpec::Table { values } => {
                if !self.omega.is_explicit() || !self.uncertainty.is_explicit() {
                    issues.push(
                        "objective: table objectives require explicit omega and uncertainty"
                            .into(),
                    );
                }
                let nx = self.omega.size_hint().unwrap_or(0);
                let nu = self.uncertainty.size_hint().unwrap_or(0);
                if values.len() != nx {
                    issues.push(format!(
                        "objective.values: expected {nx} decision rows, found {}",
                        values.len()
                    ));
                }
                for (xi, row) in values.iter().enumerate() {
                    if row.len() != nu {
                        issues.push(format!(
                            "objective.values[{xi}]: expected {nu} scenario entries, found {}",
                            row.len()
                        ));
                    }
                    for (ui, v) in row.iter().enumerate() {
                        check_vector(
                            &format!("objective.values[{xi}][{ui}]"),
                            v,
                            self.m,
                            &mut issues,
                        );
                    }
                }
            }
            ObjectiveSpec::Bilinear { terms } => {
                self.validate_terms(terms, &mut issues);
            }
            ObjectiveSpec::ObjectiveWise { blocks, terms } => {
                self.validate_terms(terms, &mut issues);
                if blocks.len() != self.m {
                    issues.push(format!(
                        "objective.blocks: expected {} entries, found {}",
                        self.m,
                        blocks.len()
                    ));
                }
                if let Some(j) = blocks.iter().position(|&b| b == 0) {
                    issues.push(format!("objective.blocks[{j}]: must be at least 1"));
                }
                if blocks.iter().sum::<usize>() != self.k {
                    issues.push(format!(
                        "objective.blocks: sizes must sum to k = {}",
                        self.k
                    ));
                } else if blocks.len() == terms.len() {
                    self.validate_block_support(blocks, terms, &mut issues);
                    if issues.is_empty() && !self.uncertainty_is_block_product(blocks) {
                        issues.push(
                            "uncertainty: explicit points must form the product of their block projections"
                                .into(),
                        );
                    }
                }
            }
        }
        issues
    }

    fn validate_terms(&self, terms: &[BilinearTerm], issues: &mut Vec<String>) {
        if terms.len() != self.m {
            issues.push(format!(
                "objective.terms: expected {} terms, found {}",
                self.m,
                terms.len()
            ));
        }
        for (j, t) in terms.iter().enumerate() {
            t.validate(&format!("objective.terms[{j}]"), self.n, self.k, issues);
        }
    }

    fn validate_block_support(
        &self,
        blocks: &[usize],
        terms: &[BilinearTerm],
        issues: &mut Vec<String>,
    ) {
        let ranges = block_ranges(blocks);
        for (j, (t, range)) in terms.iter().zip(&ranges).enumerate() {
            let outside = |col: usize| !range.contains(&col);
            for (r, row) in t.q.iter().enumerate() {
                for (col, v) in row.iter().enumerate() {
                    if outside(col) && *v != 0.0 {
                        issues.push(format!(
                            "objective.terms[{j}].Q[{r}][{col}]: must be zero outside block {j}"
                        ));
                    }
                }
            }
            for (col, v) in t.d.iter().enumerate() {
                if outside(col) && *v != 0.0 {
                    issues.push(format!(
                        "objective.terms[{j}].d[{col}]: must be zero outside block {j}"
                    ));
                }
            }
        }
    }

    fn uncertainty_is_block_product(&self, blocks: &[usize]) -> bool {
        let SpaceSpec::Explicit { points } = &self.uncertainty else {
            // A box lattice is the product of its axis lattices.
            return true;
        };
        let distinct = dedup(points.iter().map(|p| p.as_slice()));
        let mut product = 1usize;
        for range in block_ranges(blocks) {
            product *= dedup(points.iter().map(|p| &p[range.clone()])).len();
        }
        product == distinct.len()
    }
}

fn dedup<'a>(items: impl Iterator<Item = &'a [f64]>) -> Vec<&'a [f64]> {
    let mut out: Vec<&[f64]> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn block_ranges(blocks: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    blocks
        .iter()
        .map(|&b| {
            let r = start..start + b;
            start += b;
            r
        })
        .collect()
}

/// A validated instance with its spaces materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainInstance {
    spec: InstanceSpec,
    decisions: Vec<Point>,
    scenarios: Vec<Point>,
}

impl UncertainInstance {
    pub fn new(spec: InstanceSpec) -> Result<Self> {
        let issues = spec.validate();
        if !issues.is_empty() {
            return Err(Error::InvalidInstance(issues));
        }
        let decisions = spec
            .omega
            .materialize()
            .into_iter()
            .map(Point::new)
            .collect::<Result<Vec<_>>>()?;
        let scenarios = spec
            .uncertainty
            .materialize()
            .into_iter()
            .map(Point::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(UncertainInstance {
            spec,
            decisions,
            scenarios,
        })
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn decisions(&self) -> &[Point] {
        &self.decisions
    }

    pub fn scenarios(&self) -> &[Point] {
        &self.scenarios
    }

    pub fn num_decisions(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_objective_wise(&self) -> bool {
        matches!(self.spec.objective, ObjectiveSpec::ObjectiveWise { .. })
    }

    pub fn decision_index(&self, x: &Point) -> Result<usize> {
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.dim(),
            });
        }
        self.decisions
            .iter()
            .position(|d| d == x)
            .ok_or(Error::UnknownDecision)
    }

    fn scenario_index(&self, u: &Point) -> Result<usize> {
        if u.dim() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: u.dim(),
            });
        }
        self.scenarios
            .iter()
            .position(|s| s == u)
            .ok_or(Error::UnknownScenario)
    }

    fn check_decision_index(&self, xi: usize) -> Result<()> {
        if xi >= self.decisions.len() {
            return Err(Error::IndexOutOfRange {
                index: xi,
                len: self.decisions.len(),
            });
        }
        Ok(())
    }

    /// `f(x, u)`. Table objectives only accept materialized points; bilinear
    /// objectives accept any points of the right dimension.
    pub fn evaluate(&self, x: &Point, u: &Point) -> Result<Point> {
        match &self.spec.objective {
            ObjectiveSpec::Table { values } => {
                let xi = self.decision_index(x)?;
                let ui = self.scenario_index(u)?;
                Point::new(values[xi][ui].clone())
            }
            ObjectiveSpec::Bilinear { terms } | ObjectiveSpec::ObjectiveWise { terms, .. } => {
                for (p, dim) in [(x, self.n()), (u, self.k())] {
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: p.dim(),
                        });
                    }
                }
                Point::new(
                    terms
                        .iter()
                        .map(|t| t.eval(x.coords(), u.coords()))
                        .collect(),
                )
            }
        }
    }

    /// `f(x_i, u_j)` by materialized indices.
    pub fn evaluate_indexed(&self, xi: usize, ui: usize) -> Result<Point> {
        self.check_decision_index(xi)?;
        if ui >= self.scenarios.len() {
            return Err(Error::IndexOutOfRange {
                index: ui,
                len: self.scenarios.len(),
            });
        }
        match &self.spec.objective {
            ObjectiveSpec::Table { values } => Point::new(values[xi][ui].clone()),
            _ => self.evaluate(&self.decisions[xi], &self.scenarios[ui]),
        }
    }

    /// `F_𝒰(x_i) = {f(x_i, u) | u ∈ 𝒰}` in scenario order.
    pub fn image_set_at(&self, xi: usize) -> Result<PointCloud> {
        let pts = (0..self.scenarios.len())
            .map(|ui| self.evaluate_indexed(xi, ui))
            .collect::<Result<Vec<_>>>()?;
        PointCloud::new(pts)
    }

    pub fn image_set(&self, x: &Point) -> Result<PointCloud> {
        self.image_set_at(self.decision_index(x)?)
    }

    /// `ub(x_i)`: componentwise maximum of the image plus `e`.
    pub fn upper_bound_at(&self, xi: usize) -> Result<Point> {
        Ok(self.image_set_at(xi)?.component_max().shifted(1.0))
    }

    pub fn upper_bound_map(&self, x: &Point) -> Result<Point> {
        self.upper_bound_at(self.decision_index(x)?)
    }

    /// Objective-wise worst case `ub(x_i) - e`.
    pub fn point_based_at(&self, xi: usize) -> Result<Point> {
        Ok(self.image_set_at(xi)?.component_max())
    }

    pub fn point_based_counterpart(&self, x: &Point) -> Result<Point> {
        self.point_based_at(self.decision_index(x)?)
    }

    /// All image points over `Ω × 𝒰`, decision-major.
    pub fn all_images(&self) -> Result<PointCloud> {
        let mut pts = Vec::with_capacity(self.decisions.len() * self.scenarios.len());
        for xi in 0..self.decisions.len() {
            pts.extend(self.image_set_at(xi)?.into_points());
        }
        PointCloud::new(pts)
    }

    /// Fits `(lb, α)` to all image points with shift `delta`.
    pub fn auto_bounds(&self, delta: f64) -> Result<Bounds> {
        fit_lower_bound(&self.all_images()?, delta)
    }

    /// Bounds with a user-chosen `α`; fails unless the image stays in
    /// `{lb} + int C^α`.
    pub fn bounds_with_alpha(&self, delta: f64, alpha: f64) -> Result<Bounds> {
        let fitted = self.auto_bounds(delta)?;
        let bounds = Bounds::new(fitted.lb, alpha, delta)?;
        if !bounds.properly_bounds(&self.all_images()?) {
            return Err(Error::InvalidCone(format!(
                "alpha = {alpha} does not properly bound the image set"
            )));
        }
        Ok(bounds)
    }

    /// The transformed set `F(x_i) = cl(F_𝒰(x_i) - R^m_+)^c ∩ [lb, ub(x_i)]_C`.
    pub fn build_f_at(&self, xi: usize, bounds: &Bounds) -> Result<Staircase> {
        self.build_f_at_with_tol(xi, bounds, DEFAULT_FIXED_POINT_TOL)
    }

    pub fn build_f_at_with_tol(&self, xi: usize, bounds: &Bounds, tol: f64) -> Result<Staircase> {
        let image = self.image_set_at(xi)?;
        let ub = image.component_max().shifted(1.0);
        // The lower set of a finite cloud is generated by its maximal points.
        let source = pareto_max(&image);
        let cone: ConeSpec = bounds.cone();
        build_staircase_with(&source, &bounds.lb, &ub, cone, tol)
    }

    pub fn build_f(&self, x: &Point, bounds: &Bounds) -> Result<Staircase> {
        self.build_f_at(self.decision_index(x)?, bounds)
    }

    /// `f(x_i, u)` for an arbitrary scenario vector; table objectives only
    /// know their materialized scenarios.
    pub(crate) fn evaluate_at_scenario(&self, xi: usize, u: &Point) -> Result<Point> {
        self.check_decision_index(xi)?;
        self.evaluate(&self.decisions[xi], u)
    }

    pub(crate) fn refined_scenarios(&self, factor: usize) -> Result<Vec<Point>> {
        if factor <= 1 || self.spec.uncertainty.is_explicit() {
            return Ok(self.scenarios.clone());
        }
        let refined = self.spec.uncertainty.refined(factor);
        if refined.size_hint().is_none_or(|n| n > MAX_MATERIALIZED_POINTS) {
            return Err(Error::InvalidArgument(format!(
                "refinement factor {factor} makes the scenario grid too large"
            )));
        }
        refined.materialize().into_iter().map(Point::new).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::staircase::lex_cmp;

    pub(crate) fn demo_spec() -> InstanceSpec {
        InstanceSpec {
            name: "demo".into(),
            n: 1,
            m: 2,
            k: 1,
            omega: SpaceSpec::Explicit {
                points: vec![vec![1.0], vec![2.0], vec![3.0]],
            },
            uncertainty: SpaceSpec::Explicit {
                points: vec![vec![1.0], vec![2.0]],
            },
            objective: ObjectiveSpec::Table {
                values: vec![
                    vec![vec![1.0, 3.0], vec![3.0, 1.0]],
                    vec![vec![2.0, 2.0], vec![2.0, 2.0]],
                    vec![vec![4.0, 4.0], vec![0.0, 0.0]],
                ],
            },
        }
    }

    pub(crate) fn demo() -> UncertainInstance {
        UncertainInstance::new(demo_spec()).unwrap()
    }

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn bilinear_xu() -> UncertainInstance {
        UncertainInstance::new(InstanceSpec {
            name: "xu".into(),
            n: 1,
            m: 2,
            k: 1,
            omega: SpaceSpec::Grid {
                lower: vec![0.0],
                upper: vec![2.0],
                steps: vec![2],
            },
            uncertainty: SpaceSpec::Grid {
                lower: vec![0.0],
                upper: vec![3.0],
                steps: vec![3],
            },
            objective: ObjectiveSpec::Bilinear {
                terms: vec![
                    BilinearTerm {
                        q: vec![vec![1.0]],
                        c: vec![0.0],
                        d: vec![0.0],
                        e: 0.0,
                    },
                    BilinearTerm {
                        q: vec![vec![0.0]],
                        c: vec![1.0],
                        d: vec![1.0],
                        e: 0.0,
                    },
                ],
            },
        })
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let inst = bilinear_xu();
        assert_eq!(inst.evaluate(&p(&[2.0]), &p(&[3.0])).unwrap(), p(&[6.0, 5.0]));
        let d = demo();
        assert_eq!(d.evaluate(&p(&[1.0]), &p(&[1.0])).unwrap(), p(&[1.0, 3.0]));
        assert_eq!(d.evaluate(&p(&[7.0]), &p(&[1.0])), Err(Error::UnknownDecision));
        assert!(matches!(
            d.evaluate_indexed(0, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn constant_bilinear_objective() {
        let zero = BilinearTerm {
            q: vec![vec![0.0]],
            c: vec![0.0],
            d: vec![0.0],
            e: 7.0,
        };
        let mut spec = demo_spec();
        spec.objective = ObjectiveSpec::Bilinear {
            terms: vec![zero.clone(), zero],
        };
        let inst = UncertainInstance::new(spec).unwrap();
        assert_eq!(inst.evaluate(&p(&[-4.0]), &p(&[9.0])).unwrap(), p(&[7.0, 7.0]));
        let b = inst.auto_bounds(1.0).unwrap();
        assert_eq!((b.lb, b.alpha), (p(&[6.0, 6.0]), 3.0));
        let img = inst.image_set_at(2).unwrap();
        assert!(img.iter().all(|y| *y == p(&[7.0, 7.0])));
    }

    #[test]
    fn grid_materializes_both_corners() {
        let s = SpaceSpec::Grid {
            lower: vec![0.0, -1.0],
            upper: vec![1.0, 1.0],
            steps: vec![1, 2],
        };
        assert_eq!(
            s.materialize(),
            vec![
                vec![0.0, -1.0],
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, -1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0]
            ]
        );
    }

    #[test]
    fn demo_maps() {
        let d = demo();
        assert_eq!(
            d.image_set_at(0).unwrap(),
            PointCloud::from_rows(&[[1.0, 3.0], [3.0, 1.0]]).unwrap()
        );
        assert_eq!(d.upper_bound_at(0).unwrap(), p(&[4.0, 4.0]));
        assert_eq!(d.upper_bound_at(1).unwrap(), p(&[3.0, 3.0]));
        assert_eq!(d.upper_bound_at(2).unwrap(), p(&[5.0, 5.0]));
        assert_eq!(d.point_based_at(0).unwrap(), p(&[3.0, 3.0]));
        assert_eq!(d.point_based_at(1).unwrap(), p(&[2.0, 2.0]));
        assert_eq!(d.point_based_counterpart(&p(&[3.0])).unwrap(), p(&[4.0, 4.0]));
        let b = d.auto_bounds(1.0).unwrap();
        assert_eq!((b.lb.clone(), b.alpha), (p(&[-1.0, -1.0]), 3.0));
    }

    #[test]
    fn demo_transformed_sets() {
        let d = demo();
        let b = d.auto_bounds(1.0).unwrap();
        let expect: [&[[f64; 2]]; 3] = [
            &[[1.0 / 3.0, 3.0], [1.0, 1.0], [3.0, 1.0 / 3.0]],
            &[[0.0, 2.0], [2.0, 0.0]],
            &[[2.0 / 3.0, 4.0], [4.0, 2.0 / 3.0]],
        ];
        for (xi, exp) in expect.iter().enumerate() {
            let st = d.build_f_at(xi, &b).unwrap();
            let mins = st.minimal_points();
            assert_eq!(mins.len(), exp.len());
            for (a, e) in mins.iter().zip(exp.iter()) {
                assert!((a[0] - e[0]).abs() <= 1e-12 && (a[1] - e[1]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn prefiltering_does_not_change_transformed_set() {
        let d = demo();
        let b = d.auto_bounds(1.0).unwrap();
        for xi in 0..3 {
            let img = d.image_set_at(xi).unwrap();
            let ub = d.upper_bound_at(xi).unwrap();
            let full = crate::staircase::build_staircase(&img, &b, &ub).unwrap();
            let filtered = d.build_f_at(xi, &b).unwrap();
            let mut a = full.minimal_points().points().to_vec();
            a.sort_by(lex_cmp);
            assert_eq!(a, filtered.minimal_points().points());
        }
    }

    #[test]
    fn single_point_bounds() {
        let spec = InstanceSpec {
            name: "single".into(),
            n: 1,
            m: 2,
            k: 1,
            omega: SpaceSpec::Explicit {
                points: vec![vec![0.0]],
            },
            uncertainty: SpaceSpec::Explicit {
                points: vec![vec![0.0]],
            },
            objective: ObjectiveSpec::Table {
                values: vec![vec![vec![0.0, 8.0]]],
            },
        };
        let b = UncertainInstance::new(spec).unwrap().auto_bounds(1.0).unwrap();
        assert_eq!((b.lb, b.alpha), (p(&[-1.0, 7.0]), 3.0));
    }

    #[test]
    fn alpha_override_must_bound_image() {
        let d = demo();
        assert!(d.bounds_with_alpha(1.0, 5.0).is_ok());
        // (4,4)-(-1,-1) = (5,5) is fine, but (1,3)-lb = (2,4) needs 4 < 2α.
        assert!(d.bounds_with_alpha(1.0, 1.5).is_err());
    }

    #[test]
    fn validation_lists_every_issue_with_paths() {
        let mut spec = demo_spec();
        if let ObjectiveSpec::Table { values } = &mut spec.objective {
            values[1][0] = vec![1.0, 2.0, 3.0];
            values[2].pop();
        }
        spec.k = 1;
        let issues = spec.validate();
        assert!(issues.iter().any(|s| s.starts_with("objective.values[1][0]")), "{issues:?}");
        assert!(issues.iter().any(|s| s.starts_with("objective.values[2]:")), "{issues:?}");

        let mut spec = demo_spec();
        spec.omega = SpaceSpec::Grid {
            lower: vec![0.0],
            upper: vec![1.0],
            steps: vec![2],
        };
        assert!(spec
            .validate()
            .iter()
            .any(|s| s.contains("require explicit")));
    }

    #[test]
    fn objective_wise_block_support_is_checked() {
        let t0 = BilinearTerm {
            q: vec![vec![1.0, 0.5]],
            c: vec![0.0],
            d: vec![0.0, 0.0],
            e: 0.0,
        };
        let t1 = BilinearTerm {
            q: vec![vec![0.0, 1.0]],
            c: vec![0.0],
            d: vec![0.0, 1.0],
            e: 0.0,
        };
        let spec = InstanceSpec {
            name: "ow".into(),
            n: 1,
            m: 2,
            k: 2,
            omega: SpaceSpec::Explicit {
                points: vec![vec![0.0], vec![1.0]],
            },
            uncertainty: SpaceSpec::Explicit {
                points: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            },
            objective: ObjectiveSpec::ObjectiveWise {
                blocks: vec![1, 1],
                terms: vec![t0, t1],
            },
        };
        let issues = spec.validate();
        assert_eq!(issues, vec!["objective.terms[0].Q[0][1]: must be zero outside block 0"]);

        let mut fixed = spec.clone();
        if let ObjectiveSpec::ObjectiveWise { terms, .. } = &mut fixed.objective {
            terms[0].q[0][1] = 0.0;
        }
        // {(0,0),(1,1)} is not a product set.
        assert!(fixed.validate()[0].contains("product"));
        fixed.uncertainty = SpaceSpec::Explicit {
            points: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]],
        };
        assert!(fixed.validate().is_empty());
    }

    #[test]
    fn refined_scenarios_only_for_grids() {
        let inst = bilinear_xu();
        assert_eq!(inst.refined_scenarios(3).unwrap().len(), 10);
        assert_eq!(demo().refined_scenarios(3).unwrap().len(), 2);
    }
}
