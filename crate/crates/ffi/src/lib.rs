//! C ABI over the robustmo core: opaque instance and report handles,
//! status codes, and a thread-local last-error message.
//!
//! Point clouds cross the boundary as row-major `double` arrays of
//! `count * m` entries. Output arrays come with a capacity; when it is too
//! small the call returns `RMO_BUFFER_TOO_SMALL` and writes the required
//! length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use robustmo::cli::{parse_instance, parse_instance_str, CliError};
use robustmo::{Error, Point, PointCloud, RelationKind, SolveReport, UncertainInstance};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidInstance = 4,
    Io = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmoRelation {
    StrictLower = 0,
    Lower = 1,
    StrictUpper = 2,
    Upper = 3,
}

impl From<RmoRelation> for RelationKind {
    fn from(r: RmoRelation) -> Self {
        match r {
            RmoRelation::StrictLower => RelationKind::StrictLower,
            RmoRelation::Lower => RelationKind::Lower,
            RmoRelation::StrictUpper => RelationKind::StrictUpper,
            RmoRelation::Upper => RelationKind::Upper,
        }
    }
}

/// Opaque validated instance.
pub struct RmoInstance {
    inner: UncertainInstance,
}

/// Opaque solver result.
pub struct RmoSolveReport {
    inner: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (RmoStatus, String);

fn status_of(e: &Error) -> RmoStatus {
    match e {
        Error::DimensionMismatch { .. } => RmoStatus::DimensionMismatch,
        Error::InvalidInstance(_) => RmoStatus::InvalidInstance,
        Error::NoConvergence { .. } | Error::NonPositiveShift { .. } | Error::OutsideBounds { .. } => {
            RmoStatus::Numerical
        }
        _ => RmoStatus::InvalidArgument,
    }
}

fn core_err(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn cli_err(e: CliError) -> Failure {
    let status = match &e {
        CliError::Io { .. } => RmoStatus::Io,
        CliError::Json(_) => RmoStatus::InvalidInstance,
        CliError::Core(c) => status_of(c),
        CliError::Usage(_) => RmoStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn null(what: &str) -> Failure {
    (RmoStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RmoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RmoStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RmoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RmoStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn cloud_arg(data: *const f64, count: usize, m: usize, what: &str) -> Result<PointCloud, Failure> {
    if data.is_null() {
        return Err(null(what));
    }
    if m == 0 || count == 0 {
        return Err((RmoStatus::InvalidArgument, format!("{what} must have positive size")));
    }
    let len = count
        .checked_mul(m)
        .ok_or((RmoStatus::InvalidArgument, format!("{what} is too large")))?;
    let flat = std::slice::from_raw_parts(data, len);
    PointCloud::from_rows(&flat.chunks(m).collect::<Vec<_>>()).map_err(core_err)
}

unsafe fn write_out<T: Copy>(src: &[T], out: *mut T, cap: usize, len: *mut usize) -> Result<(), Failure> {
    if len.is_null() {
        return Err(null("len"));
    }
    *len = src.len();
    if src.len() > cap {
        return Err((
            RmoStatus::BufferTooSmall,
            format!("buffer holds {cap} entries, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

unsafe fn instance_ref<'a>(inst: *const RmoInstance) -> Result<&'a UncertainInstance, Failure> {
    inst.as_ref().map(|i| &i.inner).ok_or_else(|| null("instance"))
}

unsafe fn report_ref<'a>(r: *const RmoSolveReport) -> Result<&'a SolveReport, Failure> {
    r.as_ref().map(|r| &r.inner).ok_or_else(|| null("report"))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn rmo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON instance document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_instance_parse(json: *const c_char, out: *mut *mut RmoInstance) -> RmoStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = parse_instance_str(text).map_err(cli_err)?;
        *out = Box::into_raw(Box::new(RmoInstance { inner }));
        Ok(())
    })
}

/// Loads a JSON instance file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_instance_load(path: *const c_char, out: *mut *mut RmoInstance) -> RmoStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = parse_instance(Path::new(path)).map_err(cli_err)?;
        *out = Box::into_raw(Box::new(RmoInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from `rmo_instance_parse`/`rmo_instance_load` or be null.
#[no_mangle]
pub unsafe extern "C" fn rmo_instance_free(inst: *mut RmoInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Writes `n`, `m`, `k` and the number of materialized decisions.
///
/// # Safety
/// All pointers must be valid; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_instance_dims(
    inst: *const RmoInstance,
    n: *mut usize,
    m: *mut usize,
    k: *mut usize,
    decisions: *mut usize,
) -> RmoStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        if n.is_null() || m.is_null() || k.is_null() || decisions.is_null() {
            return Err(null("output"));
        }
        *n = inst.n();
        *m = inst.m();
        *k = inst.k();
        *decisions = inst.num_decisions();
        Ok(())
    })
}

/// Robust weakly efficient decision indices by brute force.
///
/// # Safety
/// `out` must hold `cap` entries; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_oracle_robust(
    inst: *const RmoInstance,
    out: *mut usize,
    cap: usize,
    len: *mut usize,
) -> RmoStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        let idx = robustmo::oracle_robust(inst).map_err(core_err)?;
        write_out(&idx, out, cap, len)
    })
}

/// Exactness threshold. `*defined` is false when no threshold applies.
///
/// # Safety
/// Pointers must be valid and writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_wfdvp_p(inst: *const RmoInstance, out: *mut usize, defined: *mut bool) -> RmoStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        if out.is_null() || defined.is_null() {
            return Err(null("output"));
        }
        let p = robustmo::wfdvp_p(inst);
        *defined = p.is_some();
        *out = p.unwrap_or(0);
        Ok(())
    })
}

/// Runs the finite solver with default options.
///
/// # Safety
/// `inst` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_solve(
    inst: *const RmoInstance,
    p: usize,
    epsilon: f64,
    out: *mut *mut RmoSolveReport,
) -> RmoStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = robustmo::solve_mp(inst, p, epsilon).map_err(core_err)?;
        *out = Box::into_raw(Box::new(RmoSolveReport { inner }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from `rmo_solve` or be null.
#[no_mangle]
pub unsafe extern "C" fn rmo_report_free(report: *mut RmoSolveReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Solution decision indices in increasing order.
///
/// # Safety
/// `out` must hold `cap` entries; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_report_solutions(
    report: *const RmoSolveReport,
    out: *mut usize,
    cap: usize,
    len: *mut usize,
) -> RmoStatus {
    guard(|| {
        let r = report_ref(report)?;
        write_out(&r.solution_indices, out, cap, len)
    })
}

/// Distinct witness points of solution `k`, row-major; `len` receives the
/// number of doubles.
///
/// # Safety
/// `out` must hold `cap` doubles; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_report_witness(
    report: *const RmoSolveReport,
    k: usize,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> RmoStatus {
    guard(|| {
        let r = report_ref(report)?;
        let w = r.witnesses.get(k).ok_or((
            RmoStatus::InvalidArgument,
            format!("solution {k} out of range ({} solutions)", r.witnesses.len()),
        ))?;
        let flat: Vec<f64> = w.iter().flat_map(|p| p.coords().iter().copied()).collect();
        write_out(&flat, out, cap, len)
    })
}

/// Lower bound (into `lb`, `m` doubles) and cone opening used by the solve.
///
/// # Safety
/// `lb` must hold `cap` doubles; `len` and `alpha` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_report_bounds(
    report: *const RmoSolveReport,
    lb: *mut f64,
    cap: usize,
    len: *mut usize,
    alpha: *mut f64,
) -> RmoStatus {
    guard(|| {
        let r = report_ref(report)?;
        if alpha.is_null() {
            return Err(null("alpha"));
        }
        *alpha = r.bounds_used.alpha;
        write_out(r.bounds_used.lb.coords(), lb, cap, len)
    })
}

/// `psi_A(y)` for a cloud of `count` points in `R^m`.
///
/// # Safety
/// `a` must hold `count * m` doubles, `y` must hold `m`, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_psi(a: *const f64, count: usize, m: usize, y: *const f64, out: *mut f64) -> RmoStatus {
    guard(|| {
        let cloud = cloud_arg(a, count, m, "a")?;
        if y.is_null() || out.is_null() {
            return Err(null("y or out"));
        }
        let y = Point::new(std::slice::from_raw_parts(y, m).to_vec()).map_err(core_err)?;
        *out = robustmo::psi(&cloud, &y).map_err(core_err)?;
        Ok(())
    })
}

/// One of the four set relations between clouds `A` and `B`.
///
/// # Safety
/// `a` must hold `na * m` doubles, `b` must hold `nb * m`, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_relation_holds(
    kind: RmoRelation,
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    m: usize,
    out: *mut bool,
) -> RmoStatus {
    guard(|| {
        let a = cloud_arg(a, na, m, "a")?;
        let b = cloud_arg(b, nb, m, "b")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = robustmo::holds(kind.into(), &a, &b).map_err(core_err)?;
        Ok(())
    })
}

/// Margin certifying `A ≺^u B`. `*certified` is false when none exists.
///
/// # Safety
/// As for `rmo_relation_holds`; `epsilon` and `certified` writable.
#[no_mangle]
pub unsafe extern "C" fn rmo_certify_strict_upper(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    m: usize,
    epsilon: *mut f64,
    certified: *mut bool,
) -> RmoStatus {
    guard(|| {
        let a = cloud_arg(a, na, m, "a")?;
        let b = cloud_arg(b, nb, m, "b")?;
        if epsilon.is_null() || certified.is_null() {
            return Err(null("output"));
        }
        let cert = robustmo::certify_strict_upper(&a, &b).map_err(core_err)?;
        *certified = cert.is_some();
        *epsilon = cert.unwrap_or(0.0);
        Ok(())
    })
}
