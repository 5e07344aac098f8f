//! C interface to `nonlocal_graphs`.
//!
//! Every fallible function returns an [`NlgStatus`]; on failure the message
//! of the last error on the calling thread is available from
//! [`nlg_last_error_message`]. Handles are opaque and must be released with
//! the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use nonlocal_graphs::curvature::{set_curvature_2d, PlanarSet};
use nonlocal_graphs::energy::{Bump, ExteriorDatum, GridSpec};
use nonlocal_graphs::lab::{parse_config_str, run_scenario, Overrides};
use nonlocal_graphs::solver::{self, Boundary, Method, SolveOptions, SolveReport};
use nonlocal_graphs::{Error, FractionalOrder};

/// Status of a call. `NLG_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidOrder = 2,
    InvalidGrid = 3,
    InvalidDatum = 4,
    InvalidConfig = 5,
    NotConverged = 6,
    Quadrature = 7,
    Io = 8,
    /// The computation failed for another reason; see the message.
    Failed = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlgMethod {
    DampedNewton = 0,
    PreconditionedGradient = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlgBoundary {
    Left = 0,
    Right = 1,
}

/// Exterior datum `u₀` on `ℝ ∖ (0, 1)`.
pub struct NlgDatum(ExteriorDatum);

/// Minimizer on one grid with its diagnostics.
pub struct NlgSolution(SolveReport);

/// Solver settings; zero fields select the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NlgSolveParams {
    pub s: f64,
    /// Grid spacing is `1 / cells_per_unit`.
    pub cells_per_unit: usize,
    pub truncation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub method: NlgMethod,
}

/// Planar curvature sample. `value` is `±inf` at a corner.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NlgCurvature {
    pub value: f64,
    pub estimated_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NlgStatus {
    match e {
        Error::InvalidOrder(_) => NlgStatus::InvalidOrder,
        Error::InvalidGrid(_) => NlgStatus::InvalidGrid,
        Error::InvalidDatum(_) => NlgStatus::InvalidDatum,
        Error::InvalidConfig { .. } => NlgStatus::InvalidConfig,
        Error::Quadrature(_) => NlgStatus::Quadrature,
        Error::Io { .. } => NlgStatus::Io,
        Error::Solver { .. } => NlgStatus::NotConverged,
        _ => NlgStatus::Failed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (NlgStatus, String)>) -> NlgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside nonlocal_graphs".into());
            NlgStatus::Panic
        }
    }
}

fn lib(e: Error) -> (NlgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (NlgStatus, String) {
    (NlgStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (NlgStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (NlgStatus::InvalidConfig, format!("`{name}` is not UTF-8")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nlg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nlg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Solver defaults: `s = 0.5`, `h = 1/64`, `L = 4`, tolerance `1e-9`.
#[no_mangle]
pub extern "C" fn nlg_solve_params_default() -> NlgSolveParams {
    let d = SolveOptions::default();
    NlgSolveParams {
        s: 0.5,
        cells_per_unit: nonlocal_graphs::energy::DEFAULT_CELLS_PER_UNIT,
        truncation: nonlocal_graphs::energy::DEFAULT_TRUNCATION,
        tolerance: d.tolerance,
        max_iterations: d.max_iterations,
        method: NlgMethod::DampedNewton,
    }
}

fn store<T>(out: *mut *mut T, value: T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// `slope · x + intercept`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlg_datum_linear(slope: f64, intercept: f64, out: *mut *mut NlgDatum) -> NlgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(slope.is_finite() && intercept.is_finite()) {
            return Err((NlgStatus::InvalidDatum, "coefficients must be finite".into()));
        }
        store(out, NlgDatum(ExteriorDatum::linear(slope, intercept)));
        Ok(())
    })
}

/// Two symmetric bumps of the given height and half-width touching the walls from outside.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlg_datum_two_bump(height: f64, width: f64, out: *mut *mut NlgDatum) -> NlgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(width > 0.0 && width.is_finite() && height.is_finite()) {
            return Err((NlgStatus::InvalidDatum, format!("bad bump height {height} or width {width}")));
        }
        store(out, NlgDatum(ExteriorDatum::two_bump(height, width)));
        Ok(())
    })
}

/// Linear base plus `count` bumps `height·(1 - ((x - center)/width)²)³`.
///
/// # Safety
/// `out` must be valid; the three arrays must hold `count` values each.
#[no_mangle]
pub unsafe extern "C" fn nlg_datum_bumps(
    slope: f64,
    intercept: f64,
    centers: *const f64,
    widths: *const f64,
    heights: *const f64,
    count: usize,
    out: *mut *mut NlgDatum,
) -> NlgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if count > 0 && (centers.is_null() || widths.is_null() || heights.is_null()) {
            return Err(null("bump arrays"));
        }
        let mut bumps = Vec::with_capacity(count);
        for k in 0..count {
            let b = Bump {
                center: *centers.add(k),
                width: *widths.add(k),
                height: *heights.add(k),
            };
            if !(b.width > 0.0 && b.center.is_finite() && b.width.is_finite() && b.height.is_finite()) {
                return Err((NlgStatus::InvalidDatum, format!("bad bump {k}: {b:?}")));
            }
            bumps.push(b);
        }
        store(out, NlgDatum(ExteriorDatum::with_bumps(slope, intercept, bumps)));
        Ok(())
    })
}

/// # Safety
/// `datum` must come from an `nlg_datum_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn nlg_datum_free(datum: *mut NlgDatum) {
    if !datum.is_null() {
        drop(Box::from_raw(datum));
    }
}

/// Minimizes for `datum`. A solution is stored even when the iteration did
/// not converge, in which case `NLG_STATUS_NOT_CONVERGED` is returned.
///
/// # Safety
/// `datum` and `params` must be valid handles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlg_solve(
    datum: *const NlgDatum,
    params: *const NlgSolveParams,
    out: *mut *mut NlgSolution,
) -> NlgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let datum = datum.as_ref().ok_or_else(|| null("datum"))?;
        let p = *params.as_ref().ok_or_else(|| null("params"))?;
        let order = FractionalOrder::new(p.s).map_err(lib)?;
        let grid = GridSpec::new(p.cells_per_unit, p.truncation).map_err(lib)?;
        let defaults = SolveOptions::default();
        let opts = SolveOptions {
            tolerance: if p.tolerance == 0.0 { defaults.tolerance } else { p.tolerance },
            max_iterations: if p.max_iterations == 0 { defaults.max_iterations } else { p.max_iterations },
            method: match p.method {
                NlgMethod::DampedNewton => Method::DampedNewton,
                NlgMethod::PreconditionedGradient => Method::PreconditionedGradient,
            },
            ..defaults
        };
        let report = solver::solve(datum.0.clone(), grid, order, &opts).map_err(lib)?;
        let failure = (!report.converged).then(|| report.message.clone().unwrap_or_else(|| "not converged".into()));
        store(out, NlgSolution(report));
        match failure {
            Some(msg) => Err((NlgStatus::NotConverged, msg)),
            None => Ok(()),
        }
    })
}

/// # Safety
/// `solution` must come from [`nlg_solve`], or be null.
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_free(solution: *mut NlgSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of grid nodes, exterior included. Zero for a null handle.
///
/// # Safety
/// `solution` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_len(solution: *const NlgSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.solution.values().len())
}

/// Copies node positions and values into `x` and `u` (either may be null).
///
/// # Safety
/// Non-null buffers must hold `len` values; `len` must equal [`nlg_solution_len`].
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_copy(
    solution: *const NlgSolution,
    x: *mut f64,
    u: *mut f64,
    len: usize,
) -> NlgStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        let values = s.0.solution.values();
        if len != values.len() {
            return Err((NlgStatus::Failed, format!("buffer length {len}, need {}", values.len())));
        }
        if !x.is_null() {
            ptr::copy_nonoverlapping(s.0.solution.positions().as_ptr(), x, len);
        }
        if !u.is_null() {
            ptr::copy_nonoverlapping(values.as_ptr(), u, len);
        }
        Ok(())
    })
}

/// # Safety
/// `solution` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_iterations(solution: *const NlgSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.iterations)
}

/// Sup-norm of the final energy gradient; NaN for a null handle.
///
/// # Safety
/// `solution` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_gradient_norm(solution: *const NlgSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.final_gradient_norm)
}

/// # Safety
/// `solution` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_converged(solution: *const NlgSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.0.converged)
}

/// `u(first interior node) - u₀(wall)`; NaN for a null handle.
///
/// # Safety
/// `solution` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nlg_solution_wall_jump(solution: *const NlgSolution, side: NlgBoundary) -> f64 {
    let side = match side {
        NlgBoundary::Left => Boundary::Left,
        NlgBoundary::Right => Boundary::Right,
    };
    solution.as_ref().map_or(f64::NAN, |s| solver::wall_jump(&s.0, side))
}

/// Nonlocal curvature of the disk of the given radius at the boundary point
/// with polar angle `angle`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlg_disk_curvature(
    s: f64,
    radius: f64,
    angle: f64,
    tolerance: f64,
    out: *mut NlgCurvature,
) -> NlgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let order = FractionalOrder::new(s).map_err(lib)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err((NlgStatus::InvalidConfig, format!("radius must be positive, got {radius}")));
        }
        let set = PlanarSet::disk((0.0, 0.0), radius);
        let p = (radius * angle.cos(), radius * angle.sin());
        let c = set_curvature_2d(&set, p, &order, tolerance).map_err(lib)?;
        *out = NlgCurvature {
            value: c.value,
            estimated_error: c.estimated_error,
        };
        Ok(())
    })
}

/// Runs a TOML scenario document. `output_dir` may be null to skip file
/// output. On success `*report_json` receives the JSON report without
/// timings; release it with [`nlg_string_free`].
///
/// # Safety
/// String arguments must be NUL-terminated; `report_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlg_run_scenario(
    config_toml: *const c_char,
    output_dir: *const c_char,
    report_json: *mut *mut c_char,
) -> NlgStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        let text = str_arg(config_toml, "config_toml")?;
        let output = if output_dir.is_null() {
            None
        } else {
            Some(PathBuf::from(str_arg(output_dir, "output_dir")?))
        };
        let config = parse_config_str(
            text,
            &Overrides {
                output,
                ..Overrides::default()
            },
        )
        .map_err(lib)?;
        let report = run_scenario(&config).map_err(lib)?;
        let json = CString::new(report.deterministic_json()).expect("JSON has no NUL");
        *report_json = json.into_raw();
        if !report.succeeded() {
            return Err((
                NlgStatus::NotConverged,
                format!("{} convergence failures", report.convergence_failures.len()),
            ));
        }
        Ok(())
    })
}

/// # Safety
/// `text` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn nlg_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
