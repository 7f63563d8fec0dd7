//! Command-line front end: instance ingestion, command dispatch, result
//! export and random instance generation.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure,
//! 3 discretization warning escalated by `--fail-on-warning`.

pub mod generate;
pub mod io;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::cones::Bounds;
use crate::error::Error;
use crate::points::Point;
use crate::problem::UncertainInstance;
use crate::relations::{certify_strict_upper, holds, RelationKind};
use crate::solver::{
    compare_point_based, oracle_robust, verify_approximation_with, verify_coverage_with,
    wfdvp_p, SolveOptions, TransformedInstance,
};
use crate::staircase::DEFAULT_FIXED_POINT_TOL;

pub use generate::{generate_instance, GeneratorKind, Sizes};
pub use io::{parse_instance, parse_instance_str, write_instance};

use io::{coord_fields, coord_header, fmt_num, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_DISCRETIZATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed instance document: {0}")]
    Json(serde_json::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Numeric settings shared by the commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: f64,
    pub alpha_override: Option<f64>,
    pub epsilon: f64,
    pub p: Option<usize>,
    pub grid_refine_factor: usize,
    pub tol_fixed_point: f64,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            delta: 1.0,
            alpha_override: None,
            epsilon: 0.0,
            p: None,
            grid_refine_factor: 1,
            tol_fixed_point: DEFAULT_FIXED_POINT_TOL,
            seed: 0,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad(format!("--delta must be positive, got {}", self.delta));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad(format!("--epsilon must be nonnegative, got {}", self.epsilon));
        }
        if self.p == Some(0) {
            return bad("--p must be at least 1".into());
        }
        if !(self.tol_fixed_point.is_finite() && self.tol_fixed_point > 0.0) {
            return bad(format!("--tol must be positive, got {}", self.tol_fixed_point));
        }
        if self.grid_refine_factor == 0 {
            return bad("--refine must be at least 1".into());
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            delta: self.delta,
            alpha: self.alpha_override,
            refine: self.grid_refine_factor,
            tol: self.tol_fixed_point,
        }
    }

    /// The configured `p`, else the exactness threshold, else 1.
    pub fn effective_p(&self, inst: &UncertainInstance) -> usize {
        self.p.or_else(|| wfdvp_p(inst)).unwrap_or(1)
    }
}

#[derive(Debug, Parser)]
#[command(name = "robustmo", version, about = "Set-based robust multiobjective optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Number of witness points per decision.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    epsilon: f64,
    /// Shift used when fitting the lower bound.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    delta: f64,
    /// Cone opening overriding the fitted one.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Re-check witnesses on an uncertainty grid refined by this factor.
    #[arg(long, default_value_t = 1)]
    refine: usize,
    /// Fixed-point tolerance for the box problems.
    #[arg(long, default_value_t = DEFAULT_FIXED_POINT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for result files.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            delta: self.delta,
            alpha_override: self.alpha,
            epsilon: self.epsilon,
            p: self.p,
            grid_refine_factor: self.refine,
            tol_fixed_point: self.tol,
            seed: self.seed,
            output_dir: self.out.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the finite epigraphical problem and write the solution table.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Exit with code 3 when the refined grid reveals violated witnesses.
        #[arg(long)]
        fail_on_warning: bool,
    },
    /// Brute-force robust weakly efficient decisions.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Check monotonicity, soundness, exactness and coverage.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Largest p in the chain (default: the configured p or threshold).
        #[arg(long)]
        p_max: Option<usize>,
    },
    /// Report the fitted lower bound, cone opening and upper bounds.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the four set relations between two point-cloud CSVs.
    Relations { a: PathBuf, b: PathBuf },
    /// Compare set-based and point-based robust decisions.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Write images, staircase points and bounds per decision as CSV.
    ExportGeometry {
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded random instance.
    Generate {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 4)]
        decisions: usize,
        #[arg(long, default_value_t = 3)]
        scenarios: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ROBUSTMO_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load(common: &Common) -> Result<(UncertainInstance, RunConfig), CliError> {
    let cfg = common.config();
    cfg.validate()?;
    Ok((parse_instance(&common.instance)?, cfg))
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Solve {
            common,
            fail_on_warning,
        } => {
            let (inst, cfg) = load(&common)?;
            cmd_solve(&inst, &cfg, fail_on_warning)
        }
        Command::Oracle { common } => {
            let (inst, cfg) = load(&common)?;
            cmd_oracle(&inst, &cfg)
        }
        Command::Verify { common, p_max } => {
            let (inst, cfg) = load(&common)?;
            if p_max == Some(0) {
                return Err(CliError::Usage("--p-max must be at least 1".into()));
            }
            cmd_verify(&inst, &cfg, p_max)
        }
        Command::Bounds { common } => {
            let (inst, cfg) = load(&common)?;
            cmd_bounds(&inst, &cfg)
        }
        Command::Relations { a, b } => cmd_relations(&a, &b),
        Command::Compare { common } => {
            let (inst, cfg) = load(&common)?;
            cmd_compare(&inst, &cfg)
        }
        Command::ExportGeometry { common } => {
            let (inst, cfg) = load(&common)?;
            cmd_export(&inst, &cfg)
        }
        Command::Generate {
            kind,
            decisions,
            scenarios,
            n,
            m,
            k,
            seed,
            output,
        } => {
            let kind: GeneratorKind = kind.parse()?;
            let sizes = Sizes {
                decisions,
                scenarios,
                n,
                m,
                k,
            };
            let inst = generate_instance(kind, sizes, seed)?;
            match output {
                Some(path) => write_instance(&inst, &path)?,
                None => print!("{}", io::instance_to_string(&inst)),
            }
            Ok(EXIT_OK)
        }
    }
}

fn index_list(xs: &[usize]) -> String {
    let items: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn decision_table(inst: &UncertainInstance, indices: &[usize]) -> Table {
    let mut t = Table::new(std::iter::once("decision".to_string()).chain(coord_header("x", inst.n())));
    for &xi in indices {
        let mut row = vec![xi.to_string()];
        row.extend(coord_fields(&inst.decisions()[xi]));
        t.push(row);
    }
    t
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::Json)?;
    s.push('\n');
    io::write_atomic(path, s.as_bytes())
}

fn cmd_solve(inst: &UncertainInstance, cfg: &RunConfig, fail_on_warning: bool) -> Result<i32, CliError> {
    let p = cfg.effective_p(inst);
    let prepared = TransformedInstance::new(inst, cfg.solve_options())?;
    let report = prepared.solve(p, cfg.epsilon)?;

    println!("instance: {}", inst.name());
    println!("p: {p}, epsilon: {}", fmt_num(cfg.epsilon));
    println!("solutions: {}", index_list(&report.solution_indices));

    let mut table = Table::new(
        ["decision", "witness"]
            .map(String::from)
            .into_iter()
            .chain(coord_header("y", inst.m())),
    );
    for (k, &xi) in report.solution_indices.iter().enumerate() {
        for (wi, y) in report.witnesses[k].iter().enumerate() {
            let mut row = vec![xi.to_string(), wi.to_string()];
            row.extend(coord_fields(y));
            table.push(row);
        }
    }
    if let Some(dir) = &cfg.output_dir {
        decision_table(inst, &report.solution_indices).write(&dir.join("solutions.csv"))?;
        table.write(&dir.join("witnesses.csv"))?;
        write_json(&dir.join("solve_report.json"), &report)?;
    } else {
        print!("{}", table.to_csv());
    }

    for w in &report.warnings {
        eprintln!(
            "warning: witness of decision {} violates a constraint on the grid refined by {}: {:?}",
            w.decision, w.refine, w.violation
        );
    }
    if fail_on_warning && !report.warnings.is_empty() {
        return Ok(EXIT_DISCRETIZATION);
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(inst: &UncertainInstance, cfg: &RunConfig) -> Result<i32, CliError> {
    let robust = oracle_robust(inst)?;
    println!("robust: {}", index_list(&robust));
    if let Some(dir) = &cfg.output_dir {
        decision_table(inst, &robust).write(&dir.join("oracle.csv"))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(inst: &UncertainInstance, cfg: &RunConfig, p_max: Option<usize>) -> Result<i32, CliError> {
    let threshold = wfdvp_p(inst);
    let p_max = p_max.unwrap_or_else(|| cfg.effective_p(inst));
    let approx = verify_approximation_with(inst, p_max, cfg.epsilon, cfg.solve_options())?;
    let cover_p = threshold.unwrap_or(p_max);
    let coverage = verify_coverage_with(inst, cover_p, cfg.solve_options())?;

    for (p, set) in &approx.chain {
        println!("p = {p}: {}", index_list(set));
    }
    println!("oracle: {}", index_list(&approx.oracle));
    match (threshold, &approx.at_threshold) {
        (Some(t), Some(s)) => println!(
            "threshold p = {t}: {} ({})",
            index_list(s),
            if *s == approx.oracle { "equal to oracle" } else { "differs from oracle" }
        ),
        _ => println!("threshold: none"),
    }
    match coverage.first_uncovered {
        None => println!("coverage at p = {cover_p}: all decisions covered"),
        Some(x) => println!("coverage at p = {cover_p}: decision {x} uncovered"),
    }
    if let Some(v) = &approx.violation {
        println!("violation: {v}");
    }
    let passed = approx.passed && coverage.passed;
    println!("verify: {}", if passed { "pass" } else { "fail" });

    if let Some(dir) = &cfg.output_dir {
        write_json(
            &dir.join("verify_report.json"),
            &serde_json::json!({ "approximation": approx, "coverage": coverage, "passed": passed }),
        )?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn fitted_bounds(inst: &UncertainInstance, cfg: &RunConfig) -> Result<Bounds, CliError> {
    Ok(match cfg.alpha_override {
        Some(a) => inst.bounds_with_alpha(cfg.delta, a)?,
        None => inst.auto_bounds(cfg.delta)?,
    })
}

fn bounds_table(inst: &UncertainInstance, bounds: &Bounds) -> Result<Table, CliError> {
    let m = inst.m();
    let mut t = Table::new(
        std::iter::once("decision".to_string())
            .chain(coord_header("lb", m))
            .chain(coord_header("ub", m))
            .chain(std::iter::once("alpha".to_string())),
    );
    for xi in 0..inst.num_decisions() {
        let ub = inst.upper_bound_at(xi)?;
        let mut row = vec![xi.to_string()];
        row.extend(coord_fields(&bounds.lb));
        row.extend(coord_fields(&ub));
        row.push(fmt_num(bounds.alpha));
        t.push(row);
    }
    Ok(t)
}

fn cmd_bounds(inst: &UncertainInstance, cfg: &RunConfig) -> Result<i32, CliError> {
    let bounds = fitted_bounds(inst, cfg)?;
    println!("lb: {}", fmt_point(&bounds.lb));
    println!("alpha: {}", fmt_num(bounds.alpha));
    println!("delta: {}", fmt_num(bounds.margin));
    for xi in 0..inst.num_decisions() {
        println!("ub[{xi}]: {}", fmt_point(&inst.upper_bound_at(xi)?));
    }
    if let Some(dir) = &cfg.output_dir {
        bounds_table(inst, &bounds)?.write(&dir.join("bounds.csv"))?;
    }
    Ok(EXIT_OK)
}

fn fmt_point(p: &Point) -> String {
    format!("({})", coord_fields(p).join(", "))
}

fn cmd_relations(a: &Path, b: &Path) -> Result<i32, CliError> {
    let a = io::read_cloud(a)?;
    let b = io::read_cloud(b)?;
    for kind in RelationKind::ALL {
        let h = holds(kind, &a, &b)?;
        if kind == RelationKind::StrictUpper {
            let eps = certify_strict_upper(&a, &b)?;
            let eps = eps.map_or_else(|| "none".to_string(), fmt_num);
            println!("{kind}: {h}, epsilon: {eps}");
        } else {
            println!("{kind}: {h}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_compare(inst: &UncertainInstance, cfg: &RunConfig) -> Result<i32, CliError> {
    let rep = compare_point_based(inst)?;
    println!("set_based: {}", index_list(&rep.set_based));
    println!("point_based: {}", index_list(&rep.point_based));
    println!("only_set_based: {}", index_list(&rep.only_set_based));
    println!("only_point_based: {}", index_list(&rep.only_point_based));
    if let Some(dir) = &cfg.output_dir {
        let mut t = Table::new(
            std::iter::once("decision".to_string())
                .chain(coord_header("worst", inst.m()))
                .chain(["set_based".to_string(), "point_based".to_string()]),
        );
        for (xi, v) in rep.point_based_values.iter().enumerate() {
            let mut row = vec![xi.to_string()];
            row.extend(coord_fields(v));
            row.push(rep.set_based.contains(&xi).to_string());
            row.push(rep.point_based.contains(&xi).to_string());
            t.push(row);
        }
        t.write(&dir.join("compare.csv"))?;
    }
    Ok(EXIT_OK)
}

fn cmd_export(inst: &UncertainInstance, cfg: &RunConfig) -> Result<i32, CliError> {
    let dir = cfg
        .output_dir
        .as_ref()
        .ok_or_else(|| CliError::Usage("export-geometry needs --out".into()))?;
    let prepared = TransformedInstance::new(inst, cfg.solve_options())?;
    let m = inst.m();
    for xi in 0..inst.num_decisions() {
        let mut img = Table::new(coord_header("y", m));
        for y in inst.image_set_at(xi)?.iter() {
            img.push(coord_fields(y));
        }
        img.write(&dir.join(format!("decision_{xi}_image.csv")))?;
        let mut st = Table::new(coord_header("y", m));
        for y in prepared.staircases()[xi].minimal_points().iter() {
            st.push(coord_fields(y));
        }
        st.write(&dir.join(format!("decision_{xi}_staircase.csv")))?;
    }
    bounds_table(inst, prepared.bounds())?.write(&dir.join("bounds.csv"))?;
    println!(
        "wrote geometry for {} decisions to {}",
        inst.num_decisions(),
        dir.display()
    );
    Ok(EXIT_OK)
}
