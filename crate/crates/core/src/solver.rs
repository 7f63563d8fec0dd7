//! Robust weak efficiency: the brute-force oracle, the finite epigraphical
//! solver over transformed sets, exactness thresholds, and verification
//! routines that cross-check them.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cones::Bounds;
use crate::error::{Error, Result};
use crate::points::{Point, PointCloud};
use crate::problem::{SpaceSpec, UncertainInstance};
use crate::relations::{holds, RelationKind};
use crate::staircase::{Staircase, DEFAULT_FIXED_POINT_TOL};

/// Decisions `x̄` with no `x′` such that `F_𝒰(x′) ≺^u F_𝒰(x̄)`, in decision order.
pub fn oracle_robust(inst: &UncertainInstance) -> Result<Vec<usize>> {
    let images = all_image_sets(inst)?;
    robust_indices(&images)
}

fn all_image_sets(inst: &UncertainInstance) -> Result<Vec<PointCloud>> {
    (0..inst.num_decisions())
        .into_par_iter()
        .map(|xi| inst.image_set_at(xi))
        .collect()
}

fn robust_indices(images: &[PointCloud]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (xi, target) in images.iter().enumerate() {
        let mut dominated = false;
        for other in images {
            if holds(RelationKind::StrictUpper, other, target)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            out.push(xi);
        }
    }
    Ok(out)
}

/// Which scenarios the semi-infinite constraints are checked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioGrid {
    /// The materialized uncertainty set.
    Instance,
    /// The uncertainty grid with every step count multiplied by the factor.
    Refined(usize),
}

/// Feasibility of `(x_i, y¹, …, y^p)` for the semi-infinite constraints:
/// `min_j (f_j(x, u) - y^i_j) <= 0` for every scenario and `y^i - lb ∈ C^α`.
pub fn semiinfinite_feasible(
    inst: &UncertainInstance,
    xi: usize,
    ys: &[Point],
    bounds: &Bounds,
    grid: ScenarioGrid,
) -> Result<bool> {
    Ok(first_violation(inst, xi, ys, bounds, grid)?.is_none())
}

/// A constraint that fails for a candidate witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// `y^i - lb` is not in the cone.
    Cone { witness: usize },
    /// Some scenario's image lies strictly above `y^i` in every objective.
    Scenario { witness: usize, scenario: Point },
}

fn first_violation(
    inst: &UncertainInstance,
    xi: usize,
    ys: &[Point],
    bounds: &Bounds,
    grid: ScenarioGrid,
) -> Result<Option<Violation>> {
    if ys.is_empty() {
        return Err(Error::InvalidArgument("witness list is empty".into()));
    }
    for y in ys {
        bounds.lb.check_dim(y)?;
    }
    let cone = bounds.cone();
    for (wi, y) in ys.iter().enumerate() {
        if !cone.contains_raw(y.sub(&bounds.lb).coords(), false) {
            return Ok(Some(Violation::Cone { witness: wi }));
        }
    }
    let scenarios = match grid {
        ScenarioGrid::Instance => inst.scenarios().to_vec(),
        ScenarioGrid::Refined(k) => inst.refined_scenarios(k)?,
    };
    for u in &scenarios {
        let f = inst.evaluate_at_scenario(xi, u)?;
        for (wi, y) in ys.iter().enumerate() {
            if f.lt(y) {
                continue;
            }
            let gap = f
                .coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| a - b)
                .fold(f64::INFINITY, f64::min);
            if gap > 0.0 {
                return Ok(Some(Violation::Scenario {
                    witness: wi,
                    scenario: u.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Guaranteed exactness threshold for the finite solver, if one applies.
pub fn wfdvp_p(inst: &UncertainInstance) -> Option<usize> {
    if inst.is_objective_wise() {
        return Some(inst.m());
    }
    let spec = inst.spec();
    let omega_bound = match &spec.omega {
        SpaceSpec::Explicit { .. } => Some(inst.num_decisions().saturating_sub(1).max(1)),
        SpaceSpec::Grid { .. } => None,
    };
    let scenario_bound = match &spec.uncertainty {
        SpaceSpec::Explicit { .. } => {
            let s = u32::try_from(inst.scenarios().len()).unwrap_or(u32::MAX);
            Some(inst.m().saturating_pow(s))
        }
        SpaceSpec::Grid { .. } => None,
    };
    match (omega_bound, scenario_bound) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Solver settings beyond `p` and `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Shift `δ` for fitting `lb`.
    pub delta: f64,
    /// Cone opening to use instead of the fitted one.
    pub alpha: Option<f64>,
    /// Re-check accepted witnesses on an uncertainty grid refined by this factor.
    pub refine: usize,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            delta: 1.0,
            alpha: None,
            refine: 1,
            tol: DEFAULT_FIXED_POINT_TOL,
        }
    }
}

/// Sizes of the materialized spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    pub omega_kind: &'static str,
    pub omega_size: usize,
    pub uncertainty_kind: &'static str,
    pub uncertainty_size: usize,
    pub refine: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub bounds_secs: f64,
    pub staircases_secs: f64,
    pub search_secs: f64,
}

/// An accepted witness that violates a constraint on the refined grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizationWarning {
    pub decision: usize,
    pub refine: usize,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solution_indices: Vec<usize>,
    pub p: usize,
    pub epsilon: f64,
    /// One accepting tuple per solution, as its distinct points. The full
    /// `p`-tuple repeats the last point until it has `p` entries.
    pub witnesses: Vec<Vec<Point>>,
    pub bounds_used: Bounds,
    pub grid_info: GridInfo,
    pub warnings: Vec<DiscretizationWarning>,
    #[serde(skip)]
    pub timings: Timings,
}

impl SolveReport {
    /// The witness of solution `k` padded to length `p`.
    pub fn padded_witness(&self, k: usize) -> Vec<Point> {
        let w = &self.witnesses[k];
        let mut out = w.clone();
        while out.len() < self.p {
            out.push(w[w.len() - 1].clone());
        }
        out
    }
}

/// An instance together with its bounds and transformed sets, so that the
/// finite solver can be run for several `p` and `ε` without rebuilding.
#[derive(Debug, Clone)]
pub struct TransformedInstance<'a> {
    inst: &'a UncertainInstance,
    bounds: Bounds,
    staircases: Vec<Staircase>,
    options: SolveOptions,
    timings: Timings,
}

impl<'a> TransformedInstance<'a> {
    pub fn new(inst: &'a UncertainInstance, options: SolveOptions) -> Result<Self> {
        if options.refine == 0 {
            return Err(Error::InvalidArgument("refine factor must be at least 1".into()));
        }
        let t0 = Instant::now();
        let bounds = match options.alpha {
            Some(alpha) => inst.bounds_with_alpha(options.delta, alpha)?,
            None => inst.auto_bounds(options.delta)?,
        };
        let t1 = Instant::now();
        let staircases = (0..inst.num_decisions())
            .into_par_iter()
            .map(|xi| inst.build_f_at_with_tol(xi, &bounds, options.tol))
            .collect::<Result<Vec<_>>>()?;
        let timings = Timings {
            bounds_secs: (t1 - t0).as_secs_f64(),
            staircases_secs: t1.elapsed().as_secs_f64(),
            search_secs: 0.0,
        };
        Ok(TransformedInstance {
            inst,
            bounds,
            staircases,
            options,
            timings,
        })
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn staircases(&self) -> &[Staircase] {
        &self.staircases
    }

    /// Indices into `Min F(x̄)` left undominated by `x′` under shift `ε`.
    fn undominated(&self, target: usize, other: usize, epsilon: f64) -> Vec<usize> {
        let mins = self.staircases[target].minimal_points();
        let qs = self.staircases[other].minimal_points();
        mins.iter()
            .enumerate()
            .filter(|(_, y)| {
                let shifted = y.shifted(-epsilon);
                !qs.iter().any(|q| q.lt(&shifted))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// The lexicographically first accepting witness for decision `target`.
    fn accepting_witness(&self, target: usize, p: usize, epsilon: f64) -> Option<Vec<usize>> {
        let size = self.staircases[target].minimal_points().len();
        let r = p.min(size);
        let mut sets: Vec<BitSet> = Vec::new();
        for other in 0..self.staircases.len() {
            let undom = self.undominated(target, other, epsilon);
            if undom.is_empty() {
                return None;
            }
            if undom.len() < size {
                sets.push(BitSet::from_indices(size, &undom));
            }
        }
        first_hitting_set(size, r, &sets)
    }

    /// Finite solution of the epigraphical problem for this `p` and `ε`.
    pub fn solve(&self, p: usize, epsilon: f64) -> Result<SolveReport> {
        if p < 1 {
            return Err(Error::InvalidArgument("p must be at least 1".into()));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        let t0 = Instant::now();
        let accepted: Vec<Option<Vec<usize>>> = (0..self.staircases.len())
            .into_par_iter()
            .map(|xi| self.accepting_witness(xi, p, epsilon))
            .collect();

        let mut solution_indices = Vec::new();
        let mut witnesses = Vec::new();
        for (xi, w) in accepted.into_iter().enumerate() {
            if let Some(w) = w {
                let mins = self.staircases[xi].minimal_points().points();
                solution_indices.push(xi);
                witnesses.push(w.into_iter().map(|i| mins[i].clone()).collect::<Vec<_>>());
            }
        }

        let mut warnings = Vec::new();
        if self.options.refine > 1 {
            for (&xi, w) in solution_indices.iter().zip(&witnesses) {
                let grid = ScenarioGrid::Refined(self.options.refine);
                if let Some(violation) = first_violation(self.inst, xi, w, &self.bounds, grid)? {
                    warnings.push(DiscretizationWarning {
                        decision: xi,
                        refine: self.options.refine,
                        violation,
                    });
                }
            }
        }

        let spec = self.inst.spec();
        Ok(SolveReport {
            solution_indices,
            p,
            epsilon,
            witnesses,
            bounds_used: self.bounds.clone(),
            grid_info: GridInfo {
                omega_kind: spec.omega.kind(),
                omega_size: self.inst.num_decisions(),
                uncertainty_kind: spec.uncertainty.kind(),
                uncertainty_size: self.inst.scenarios().len(),
                refine: self.options.refine,
            },
            warnings,
            timings: Timings {
                search_secs: t0.elapsed().as_secs_f64(),
                ..self.timings
            },
        })
    }
}

/// Fixed-width bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for &i in idx {
            words[i / 64] |= 1 << (i % 64);
        }
        BitSet { words }
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn max(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + 63 - w.leading_zeros() as usize)
    }
}

/// Lexicographically first strictly increasing `r`-tuple over `0..len`
/// meeting every set, or `None`.
fn first_hitting_set(len: usize, r: usize, sets: &[BitSet]) -> Option<Vec<usize>> {
    // A set hit whenever one of its subsets is hit adds no constraint.
    let mut reduced: Vec<BitSet> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let implied = sets.iter().enumerate().any(|(j, t)| {
            j != i && t.is_subset(s) && (t != s || j < i)
        });
        if !implied {
            reduced.push(s.clone());
        }
    }
    let maxima: Vec<usize> = reduced.iter().map(|s| s.max().unwrap_or(0)).collect();
    let mut chosen = Vec::with_capacity(r);
    let mut hit = vec![false; reduced.len()];
    if search(len, r, &reduced, &maxima, 0, &mut chosen, &mut hit) {
        Some(chosen)
    } else {
        None
    }
}

fn search(
    len: usize,
    r: usize,
    sets: &[BitSet],
    maxima: &[usize],
    start: usize,
    chosen: &mut Vec<usize>,
    hit: &mut [bool],
) -> bool {
    let open: Vec<usize> = (0..sets.len()).filter(|&s| !hit[s]).collect();
    if chosen.len() == r || open.is_empty() {
        if !open.is_empty() {
            return false;
        }
        // Fill the remaining slots with the smallest unused indices.
        let mut next = start;
        while chosen.len() < r {
            chosen.push(next);
            next += 1;
        }
        return next <= len;
    }
    let picks_left = r - chosen.len();
    for i in start..=len - picks_left {
        // Later picks exceed `i - 1`, so a set whose largest member is
        // below `i` can no longer be hit.
        if open.iter().any(|&s| maxima[s] < i) {
            return false;
        }
        let newly: Vec<usize> = open
            .iter()
            .copied()
            .filter(|&s| sets[s].contains(i))
            .collect();
        for &s in &newly {
            hit[s] = true;
        }
        chosen.push(i);
        if search(len, r, sets, maxima, i + 1, chosen, hit) {
            return true;
        }
        chosen.truncate(chosen.len() - 1);
        for &s in &newly {
            hit[s] = false;
        }
    }
    false
}

/// `solve_mp` with default options.
pub fn solve_mp(inst: &UncertainInstance, p: usize, epsilon: f64) -> Result<SolveReport> {
    solve_mp_with(inst, p, epsilon, SolveOptions::default())
}

pub fn solve_mp_with(
    inst: &UncertainInstance,
    p: usize,
    epsilon: f64,
    options: SolveOptions,
) -> Result<SolveReport> {
    if p < 1 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    TransformedInstance::new(inst, options)?.solve(p, epsilon)
}

/// Outcome of the monotonicity and exactness checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub epsilon: f64,
    /// `(p, solution set)` for `p = 1..=p_max`.
    pub chain: Vec<(usize, Vec<usize>)>,
    pub oracle: Vec<usize>,
    pub wfdvp_p: Option<usize>,
    /// The solution set at the `wfdvp_p` threshold, when one applies.
    pub at_threshold: Option<Vec<usize>>,
    pub passed: bool,
    /// First failed check in plain words.
    pub violation: Option<String>,
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Checks the chain `p ↦ solve_mp(p, ε)` for monotone inclusion. At `ε = 0`
/// each set must also lie in the oracle set and equal it at `wfdvp_p`.
pub fn verify_approximation(
    inst: &UncertainInstance,
    p_max: usize,
    epsilon: f64,
) -> Result<ApproximationReport> {
    verify_approximation_with(inst, p_max, epsilon, SolveOptions::default())
}

pub fn verify_approximation_with(
    inst: &UncertainInstance,
    p_max: usize,
    epsilon: f64,
    options: SolveOptions,
) -> Result<ApproximationReport> {
    if p_max < 1 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    let prepared = TransformedInstance::new(inst, options)?;
    let oracle = oracle_robust(inst)?;
    let threshold = wfdvp_p(inst);

    let mut chain = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        chain.push((p, prepared.solve(p, epsilon)?.solution_indices));
    }
    let at_threshold = match threshold {
        Some(t) if t <= p_max => Some(chain[t - 1].1.clone()),
        Some(t) => Some(prepared.solve(t, epsilon)?.solution_indices),
        None => None,
    };

    let mut violation = None;
    for w in chain.windows(2) {
        if !is_subset(&w[0].1, &w[1].1) {
            violation = Some(format!(
                "solutions at p = {} are not contained in those at p = {}",
                w[0].0, w[1].0
            ));
            break;
        }
    }
    if violation.is_none() && epsilon == 0.0 {
        if let Some((p, _)) = chain.iter().find(|(_, s)| !is_subset(s, &oracle)) {
            violation = Some(format!(
                "solutions at p = {p} include a decision the oracle rejects"
            ));
        } else if let (Some(t), Some(s)) = (threshold, &at_threshold) {
            if *s != oracle {
                violation = Some(format!(
                    "solutions at the exactness threshold p = {t} differ from the oracle"
                ));
            }
        }
    }
    Ok(ApproximationReport {
        epsilon,
        chain,
        oracle,
        wfdvp_p: threshold,
        at_threshold,
        passed: violation.is_none(),
        violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub p: usize,
    pub solutions: Vec<usize>,
    /// For each decision, a solution whose image set is `⪯^u` its own.
    pub covered_by: Vec<Option<usize>>,
    pub first_uncovered: Option<usize>,
    pub passed: bool,
}

/// Checks that every decision is covered under `⪯^u` by a solution of
/// `solve_mp(p, 0)`.
pub fn verify_coverage(inst: &UncertainInstance, p: usize) -> Result<CoverageReport> {
    verify_coverage_with(inst, p, SolveOptions::default())
}

pub fn verify_coverage_with(
    inst: &UncertainInstance,
    p: usize,
    options: SolveOptions,
) -> Result<CoverageReport> {
    let solutions = solve_mp_with(inst, p, 0.0, options)?.solution_indices;
    let images = all_image_sets(inst)?;
    let mut covered_by = Vec::with_capacity(images.len());
    for (xi, img) in images.iter().enumerate() {
        let cover = if solutions.contains(&xi) {
            Some(xi)
        } else {
            let mut found = None;
            for &s in &solutions {
                if holds(RelationKind::Upper, &images[s], img)? {
                    found = Some(s);
                    break;
                }
            }
            found
        };
        covered_by.push(cover);
    }
    let first_uncovered = covered_by.iter().position(Option::is_none);
    Ok(CoverageReport {
        p,
        solutions,
        covered_by,
        first_uncovered,
        passed: first_uncovered.is_none(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `ub(x) - e` per decision.
    pub point_based_values: Vec<Point>,
    pub point_based: Vec<usize>,
    pub set_based: Vec<usize>,
    pub only_set_based: Vec<usize>,
    pub only_point_based: Vec<usize>,
}

/// Weakly efficient decisions of the objective-wise worst case next to the
/// set-based robust ones.
pub fn compare_point_based(inst: &UncertainInstance) -> Result<ComparisonReport> {
    let values = (0..inst.num_decisions())
        .map(|xi| inst.point_based_at(xi))
        .collect::<Result<Vec<_>>>()?;
    let point_based: Vec<usize> = (0..values.len())
        .filter(|&xi| !values.iter().any(|v| v.lt(&values[xi])))
        .collect();
    let set_based = oracle_robust(inst)?;
    let only_set_based = set_based
        .iter()
        .copied()
        .filter(|x| !point_based.contains(x))
        .collect();
    let only_point_based = point_based
        .iter()
        .copied()
        .filter(|x| !set_based.contains(x))
        .collect();
    Ok(ComparisonReport {
        point_based_values: values,
        point_based,
        set_based,
        only_set_based,
        only_point_based,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::tests::{demo, demo_spec};
    use crate::problem::{BilinearTerm, InstanceSpec, ObjectiveSpec};
    use crate::staircase::build_staircase;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn table(values: Vec<Vec<Vec<f64>>>) -> UncertainInstance {
        let nx = values.len();
        let nu = values[0].len();
        let m = values[0][0].len();
        UncertainInstance::new(InstanceSpec {
            name: "t".into(),
            n: 1,
            m,
            k: 1,
            omega: SpaceSpec::Explicit {
                points: (0..nx).map(|i| vec![i as f64]).collect(),
            },
            uncertainty: SpaceSpec::Explicit {
                points: (0..nu).map(|i| vec![i as f64]).collect(),
            },
            objective: ObjectiveSpec::Table { values },
        })
        .unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_robust(&demo()).unwrap(), vec![0, 1]);
        assert_eq!(oracle_robust(&table(vec![vec![vec![5.0, 5.0]]])).unwrap(), vec![0]);
        let det = table(vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]]);
        assert_eq!(oracle_robust(&det).unwrap(), vec![0, 1]);
    }

    #[test]
    fn semiinfinite_examples() {
        let d = demo();
        let b = d.auto_bounds(1.0).unwrap();
        let g = ScenarioGrid::Instance;
        assert!(semiinfinite_feasible(&d, 1, &[p(&[2.0, 2.0])], &b, g).unwrap());
        assert!(!semiinfinite_feasible(&d, 1, &[p(&[1.0, 1.0])], &b, g).unwrap());
        for xi in 0..3 {
            let ub = d.upper_bound_at(xi).unwrap();
            assert!(semiinfinite_feasible(&d, xi, &[ub], &b, g).unwrap());
        }
        assert!(semiinfinite_feasible(&d, 0, &[], &b, g).is_err());
    }

    #[test]
    fn solve_examples() {
        let d = demo();
        let r = solve_mp(&d, 1, 0.0).unwrap();
        assert_eq!(r.solution_indices, vec![0, 1]);
        assert_eq!(r.witnesses[0], vec![p(&[1.0, 1.0])]);
        assert_eq!(r.witnesses[1], vec![p(&[0.0, 2.0])]);
        assert_eq!(solve_mp(&d, 4, 0.0).unwrap().solution_indices, vec![0, 1]);
        assert_eq!(solve_mp(&d, 1, 10.0).unwrap().solution_indices, vec![0, 1, 2]);
        assert!(solve_mp(&d, 0, 0.0).is_err());
        assert!(solve_mp(&d, 1, -1.0).is_err());
    }

    #[test]
    fn witnesses_are_feasible_and_padded() {
        let d = demo();
        let r = solve_mp(&d, 3, 0.0).unwrap();
        for (k, &xi) in r.solution_indices.iter().enumerate() {
            let w = r.padded_witness(k);
            assert_eq!(w.len(), 3);
            assert!(semiinfinite_feasible(&d, xi, &w, &r.bounds_used, ScenarioGrid::Instance).unwrap());
        }
    }

    #[test]
    fn wfdvp_examples() {
        assert_eq!(wfdvp_p(&demo()), Some(2));
        assert_eq!(wfdvp_p(&table(vec![vec![vec![1.0]]])), Some(1));
        let mut spec = demo_spec();
        spec.omega = SpaceSpec::Grid {
            lower: vec![0.0],
            upper: vec![1.0],
            steps: vec![3],
        };
        spec.uncertainty = SpaceSpec::Grid {
            lower: vec![0.0],
            upper: vec![1.0],
            steps: vec![3],
        };
        let t = BilinearTerm {
            q: vec![vec![1.0]],
            c: vec![0.0],
            d: vec![0.0],
            e: 0.0,
        };
        spec.objective = ObjectiveSpec::Bilinear {
            terms: vec![t.clone(), t],
        };
        let inst = UncertainInstance::new(spec).unwrap();
        assert_eq!(wfdvp_p(&inst), None);
    }

    #[test]
    fn verify_and_cover_demo() {
        let d = demo();
        let rep = verify_approximation(&d, 4, 0.0).unwrap();
        assert!(rep.passed, "{:?}", rep.violation);
        assert_eq!(rep.at_threshold, Some(vec![0, 1]));
        let cov = verify_coverage(&d, 2).unwrap();
        assert!(cov.passed);
        // x₂ covers x₃ as well; the first solution in decision order is reported.
        assert_eq!(cov.covered_by, vec![Some(0), Some(1), Some(0)]);
        let img = |i| d.image_set_at(i).unwrap();
        assert!(holds(RelationKind::Upper, &img(1), &img(2)).unwrap());
    }

    #[test]
    fn compare_demo() {
        let c = compare_point_based(&demo()).unwrap();
        assert_eq!(c.point_based, vec![1]);
        assert_eq!(c.set_based, vec![0, 1]);
        assert_eq!(c.only_set_based, vec![0]);
        assert!(c.only_point_based.is_empty());
    }

    #[test]
    fn hitting_set_is_lexicographically_first() {
        let s = |idx: &[usize]| BitSet::from_indices(5, idx);
        assert_eq!(first_hitting_set(5, 2, &[s(&[1, 3]), s(&[2, 3])]), Some(vec![0, 3]));
        assert_eq!(first_hitting_set(5, 1, &[s(&[1]), s(&[2])]), None);
        assert_eq!(first_hitting_set(5, 2, &[s(&[1]), s(&[2])]), Some(vec![1, 2]));
        assert_eq!(first_hitting_set(5, 3, &[]), Some(vec![0, 1, 2]));
        assert_eq!(first_hitting_set(3, 3, &[s(&[2])]), Some(vec![0, 1, 2]));
    }

    fn brute_hitting(len: usize, r: usize, sets: &[Vec<usize>]) -> Option<Vec<usize>> {
        fn rec(len: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == r {
                out.push(cur.clone());
                return;
            }
            for i in start..len {
                cur.push(i);
                rec(len, r, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        rec(len, r, 0, &mut Vec::new(), &mut all);
        all.into_iter()
            .find(|c| sets.iter().all(|s| s.iter().any(|i| c.contains(i))))
    }

    proptest! {
        #[test]
        fn hitting_set_matches_enumeration(
            len in 1usize..8,
            raw in prop::collection::vec(prop::collection::vec(0usize..8, 1..4), 0..6),
            r in 1usize..8,
        ) {
            let r = r.min(len);
            let sets: Vec<Vec<usize>> = raw
                .into_iter()
                .map(|s| s.into_iter().map(|i| i % len).collect())
                .collect();
            let bits: Vec<BitSet> = sets.iter().map(|s| BitSet::from_indices(len, s)).collect();
            prop_assert_eq!(first_hitting_set(len, r, &bits), brute_hitting(len, r, &sets));
        }

        #[test]
        fn solve_is_sound_and_monotone(
            values in prop::collection::vec(
                prop::collection::vec(prop::collection::vec(0u8..6, 2), 2..4), 2..5),
        ) {
            let nu = values[0].len();
            let values: Vec<Vec<Vec<f64>>> = values
                .into_iter()
                .map(|row| {
                    let mut row: Vec<Vec<f64>> = row
                        .into_iter()
                        .map(|v| v.into_iter().map(f64::from).collect())
                        .collect();
                    row.resize(nu, row[0].clone());
                    row
                })
                .collect();
            let inst = table(values);
            let prepared = TransformedInstance::new(&inst, SolveOptions::default()).unwrap();
            let oracle = oracle_robust(&inst).unwrap();
            let mut prev: Vec<usize> = Vec::new();
            for p in 1..=wfdvp_p(&inst).unwrap() {
                let s = prepared.solve(p, 0.0).unwrap().solution_indices;
                prop_assert!(is_subset(&prev, &s));
                prop_assert!(is_subset(&s, &oracle));
                let loose = prepared.solve(p, 0.5).unwrap().solution_indices;
                prop_assert!(is_subset(&s, &loose));
                prev = s;
            }
            prop_assert_eq!(prev, oracle);
        }
    }

    fn objective_wise_instance() -> UncertainInstance {
        let t0 = BilinearTerm {
            q: vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            c: vec![0.0, 1.0],
            d: vec![0.5, 0.0],
            e: 0.0,
        };
        let t1 = BilinearTerm {
            q: vec![vec![0.0, -1.0], vec![0.0, 2.0]],
            c: vec![1.0, 0.0],
            d: vec![0.0, 0.0],
            e: 1.0,
        };
        UncertainInstance::new(InstanceSpec {
            name: "ow".into(),
            n: 2,
            m: 2,
            k: 2,
            omega: SpaceSpec::Grid {
                lower: vec![-1.0, -1.0],
                upper: vec![1.0, 1.0],
                steps: vec![2, 2],
            },
            uncertainty: SpaceSpec::Grid {
                lower: vec![-1.0, 0.0],
                upper: vec![1.0, 1.0],
                steps: vec![2, 2],
            },
            objective: ObjectiveSpec::ObjectiveWise {
                blocks: vec![1, 1],
                terms: vec![t0, t1],
            },
        })
        .unwrap()
    }

    #[test]
    fn objective_wise_exact_at_m() {
        let inst = objective_wise_instance();
        assert_eq!(wfdvp_p(&inst), Some(2));
        assert_eq!(
            solve_mp(&inst, 2, 0.0).unwrap().solution_indices,
            oracle_robust(&inst).unwrap()
        );
    }

    #[test]
    fn objective_wise_image_collapses_to_worst_case_point() {
        let inst = objective_wise_instance();
        let bounds = inst.auto_bounds(1.0).unwrap();
        for xi in 0..inst.num_decisions() {
            let worst = PointCloud::new(vec![inst.point_based_at(xi).unwrap()]).unwrap();
            let ub = inst.upper_bound_at(xi).unwrap();
            let from_image = inst.build_f_at(xi, &bounds).unwrap();
            let from_point = build_staircase(&worst, &bounds, &ub).unwrap();
            assert_eq!(from_image.minimal_points(), from_point.minimal_points());
        }
    }

    #[test]
    fn refinement_reports_violations() {
        // Sampling u = ±1 for f = (u, -u) misses the image (0, 0) at u = 0.
        let term = |q: f64| BilinearTerm {
            q: vec![vec![q]],
            c: vec![0.0],
            d: vec![0.0],
            e: 0.0,
        };
        let inst = UncertainInstance::new(InstanceSpec {
            name: "refine".into(),
            n: 1,
            m: 2,
            k: 1,
            omega: SpaceSpec::Explicit {
                points: vec![vec![1.0]],
            },
            uncertainty: SpaceSpec::Grid {
                lower: vec![-1.0],
                upper: vec![1.0],
                steps: vec![1],
            },
            objective: ObjectiveSpec::Bilinear {
                terms: vec![term(1.0), term(-1.0)],
            },
        })
        .unwrap();
        let opts = SolveOptions {
            refine: 2,
            ..SolveOptions::default()
        };
        let r = solve_mp_with(&inst, 3, 0.0, opts).unwrap();
        assert_eq!(r.solution_indices, vec![0]);
        // The inner corner (-1, -1) lies strictly below the missed image.
        assert_eq!(r.witnesses[0][1], p(&[-1.0, -1.0]));
        assert_eq!(
            r.warnings,
            vec![DiscretizationWarning {
                decision: 0,
                refine: 2,
                violation: Violation::Scenario {
                    witness: 1,
                    scenario: p(&[0.0]),
                },
            }]
        );
        assert!(solve_mp(&inst, 3, 0.0).unwrap().warnings.is_empty());
    }
}
