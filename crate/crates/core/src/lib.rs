//! Set-valued robust multiobjective optimization on finite instances.
//!
//! Uncertain objectives are turned into staircase-shaped sets in objective
//! space, compared with lower/upper set relations, and searched for
//! multi-point robust efficient solutions.

pub mod cli;
pub mod cones;
pub mod error;
pub mod points;
pub mod problem;
pub mod relations;
pub mod solver;
pub mod staircase;

pub use cones::{fit_alpha, fit_lower_bound, Bounds, ConeSpec};
pub use error::{Error, Result};
pub use points::{pareto_max, pareto_min, Point, PointCloud};
pub use problem::{InstanceSpec, UncertainInstance};
pub use relations::{certify_strict_upper, holds, psi, RelationKind};
pub use solver::{oracle_robust, solve_mp, wfdvp_p, SolveReport};
pub use staircase::{build_staircase, solve_box_problem, BoxProblem, Staircase};
