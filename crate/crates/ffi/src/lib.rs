//! C ABI for `hyperklein`.
//!
//! Every function returns an [`HkStatus`]; on failure a message is available
//! from [`hk_last_error_message`] on the same thread. Handles are opaque and
//! owned by the caller, who releases them with the matching `*_free`.
//! Hyperboloid points are passed as `d + 1` doubles `(X_0, ..., X_d)`, Klein
//! points as `d` doubles. Point conversions use the canonical frame at
//! `(1, 0, ..., 0)`.
//!
//! # Safety
//!
//! Every pointer argument must be null or valid for the number of elements
//! stated in its documentation. Handles must come from the matching
//! constructor and must not be used after being freed.

#![allow(clippy::missing_safety_doc)]

use std::cell::{Cell, RefCell};
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use hyperklein::{
    from_klein, log_factor, make_minimax_instance, minimax_oracle, query_bound, solve, to_klein, ComplexityInputs,
    Error, FirstOrderOracle, HyperboloidPoint, KleinPoint, LorentzFrame, LorentzVector, MinimaxInstance, MinimaxParams,
    OracleOutput, SolverConfig, SolverResult, TangentVector, Termination,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    Usage = 3,
    InvalidPoint = 4,
    Numeric = 5,
    Boundary = 6,
    DegenerateFrame = 7,
    Breakdown = 8,
    ContractViolation = 9,
    Instance = 10,
    Io = 11,
    OracleFailed = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkTermination {
    Budget = 0,
    ZeroSubgradient = 1,
    Breakdown = 2,
}

/// A seeded minimax-distance benchmark instance.
pub struct HkInstance {
    inner: MinimaxInstance,
}

/// The outcome of a solver run.
pub struct HkResult {
    inner: SolverResult,
}

/// User oracle: given a point `x` of `len = d + 1` doubles, writes the
/// objective value and a subgradient tangent at `x` (`len` doubles).
/// Returns 0 on success; any other value aborts the solve.
pub type HkOracleFn = Option<
    unsafe extern "C" fn(user: *mut c_void, x: *const f64, len: usize, value: *mut f64, subgradient: *mut f64) -> i32,
>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> HkStatus {
    match err {
        Error::DimensionMismatch { .. } => HkStatus::DimensionMismatch,
        Error::Usage(_) => HkStatus::Usage,
        Error::InvalidPoint(_) => HkStatus::InvalidPoint,
        Error::Numeric(_) => HkStatus::Numeric,
        Error::Boundary { .. } => HkStatus::Boundary,
        Error::DegenerateFrame { .. } => HkStatus::DegenerateFrame,
        Error::Breakdown { .. } => HkStatus::Breakdown,
        Error::ContractViolation(_) => HkStatus::ContractViolation,
        Error::Instance(_) => HkStatus::Instance,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => HkStatus::Io,
    }
}

struct Fail(HkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(HkStatus::NullPointer, format!("{name} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> HkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HkStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HkStatus::Panic
        }
    }
}

unsafe fn input<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], Fail> {
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, name: &str) -> Result<&'a mut [f64], Fail> {
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn write<T>(ptr: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(null(name));
    }
    ptr.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(name))
}

fn point(coords: &[f64], kappa: f64) -> Result<HyperboloidPoint, Fail> {
    Ok(HyperboloidPoint::new(LorentzVector::new(coords.to_vec())?, kappa)?)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hk_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// `N(d, s, eps) = ceil(2 d (d+1) log(16 sinh(s) cosh(s) / (s eps)))`.
#[no_mangle]
pub unsafe extern "C" fn hk_query_bound(d: usize, s: f64, eps: f64, out: *mut u64) -> HkStatus {
    guard(|| write(out, query_bound(&ComplexityInputs::new(d, s, eps)?)?, "out"))
}

/// `log(16 sinh(s) cosh(s) / (s eps))`.
#[no_mangle]
pub unsafe extern "C" fn hk_log_factor(s: f64, eps: f64, out: *mut f64) -> HkStatus {
    guard(|| write(out, log_factor(s, eps)?, "out"))
}

/// Hyperbolic distance between two points of `d + 1` coordinates.
#[no_mangle]
pub unsafe extern "C" fn hk_distance(x: *const f64, y: *const f64, d: usize, kappa: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let x = point(input(x, d + 1, "x")?, kappa)?;
        let y = point(input(y, d + 1, "y")?, kappa)?;
        write(out, hyperklein::distance(&x, &y)?, "out")
    })
}

/// Klein coordinates (`d` doubles) of a hyperboloid point (`d + 1` doubles).
#[no_mangle]
pub unsafe extern "C" fn hk_to_klein(x: *const f64, d: usize, kappa: f64, u_out: *mut f64) -> HkStatus {
    guard(|| {
        let x = point(input(x, d + 1, "x")?, kappa)?;
        let u = to_klein(&LorentzFrame::canonical(d, kappa)?, &x)?;
        output(u_out, d, "u_out")?.copy_from_slice(u.as_slice());
        Ok(())
    })
}

/// Hyperboloid point (`d + 1` doubles) with the given Klein coordinates.
#[no_mangle]
pub unsafe extern "C" fn hk_from_klein(u: *const f64, d: usize, kappa: f64, x_out: *mut f64) -> HkStatus {
    guard(|| {
        let u = KleinPoint::new(input(u, d, "u")?.to_vec())?;
        let x = from_klein(&LorentzFrame::canonical(d, kappa)?, &u)?;
        output(x_out, d + 1, "x_out")?.copy_from_slice(x.coords().as_slice());
        Ok(())
    })
}

/// Builds the minimax benchmark on the ball of radius `s / kappa` around the
/// canonical origin. Release with [`hk_instance_free`].
#[no_mangle]
pub unsafe extern "C" fn hk_instance_new(
    d: usize,
    kappa: f64,
    s: f64,
    tau: f64,
    fraction: f64,
    seed: u64,
    out: *mut *mut HkInstance,
) -> HkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = make_minimax_instance(MinimaxParams {
            d,
            kappa,
            s,
            tau,
            fraction,
            seed,
        })?;
        out.write(Box::into_raw(Box::new(HkInstance { inner })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hk_instance_free(instance: *mut HkInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

#[no_mangle]
pub unsafe extern "C" fn hk_instance_dim(instance: *const HkInstance, out: *mut usize) -> HkStatus {
    guard(|| write(out, handle(instance, "instance")?.inner.params().d, "out"))
}

/// Optimal value `tau / kappa`.
#[no_mangle]
pub unsafe extern "C" fn hk_instance_fstar(instance: *const HkInstance, out: *mut f64) -> HkStatus {
    guard(|| write(out, handle(instance, "instance")?.inner.fstar(), "out"))
}

/// Writes the minimizer (`d + 1` doubles).
#[no_mangle]
pub unsafe extern "C" fn hk_instance_target(instance: *const HkInstance, out: *mut f64, len: usize) -> HkStatus {
    guard(|| {
        let target = handle(instance, "instance")?.inner.target().coords();
        if len != target.dim() + 1 {
            return Err(Error::DimensionMismatch {
                expected: target.dim() + 1,
                found: len,
            }
            .into());
        }
        output(out, len, "out")?.copy_from_slice(target.as_slice());
        Ok(())
    })
}

/// Evaluates the benchmark objective and a subgradient at `x` (`len = d + 1`).
#[no_mangle]
pub unsafe extern "C" fn hk_instance_evaluate(
    instance: *const HkInstance,
    x: *const f64,
    len: usize,
    value: *mut f64,
    subgradient: *mut f64,
) -> HkStatus {
    guard(|| {
        let inst = &handle(instance, "instance")?.inner;
        let x = point(input(x, len, "x")?, inst.params().kappa)?;
        let out = minimax_oracle(inst).evaluate(&x)?;
        output(subgradient, len, "subgradient")?.copy_from_slice(out.subgradient.coords().as_slice());
        write(value, out.value, "value")
    })
}

/// Solves the instance to accuracy `eps` with `M = 1` on its own ball.
/// Release the result with [`hk_result_free`].
#[no_mangle]
pub unsafe extern "C" fn hk_solve_minimax(instance: *const HkInstance, eps: f64, out: *mut *mut HkResult) -> HkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = &handle(instance, "instance")?.inner;
        let p = inst.params();
        let cfg = SolverConfig::new(p.d, p.kappa, inst.radius(), eps, 1.0)?.with_trace(true);
        let frame = LorentzFrame::canonical(p.d, p.kappa)?;
        let inner = solve(&cfg, &frame, &minimax_oracle(inst))?;
        out.write(Box::into_raw(Box::new(HkResult { inner })));
        Ok(())
    })
}

struct CallbackOracle {
    f: unsafe extern "C" fn(*mut c_void, *const f64, usize, *mut f64, *mut f64) -> i32,
    user: *mut c_void,
    failure: Cell<Option<i32>>,
}

impl FirstOrderOracle for CallbackOracle {
    fn evaluate(&self, x: &HyperboloidPoint) -> hyperklein::Result<OracleOutput> {
        let coords = x.coords().as_slice();
        let mut value = f64::NAN;
        let mut g = vec![0.0; coords.len()];
        let code = unsafe { (self.f)(self.user, coords.as_ptr(), coords.len(), &mut value, g.as_mut_ptr()) };
        if code != 0 {
            self.failure.set(Some(code));
            return Err(Error::ContractViolation(format!("oracle callback returned {code}")));
        }
        let g = LorentzVector::new(g).map_err(|e| Error::ContractViolation(e.to_string()))?;
        let subgradient = TangentVector::new(x.clone(), g).map_err(|e| Error::ContractViolation(e.to_string()))?;
        Ok(OracleOutput { value, subgradient })
    }
}

/// Minimizes a user objective over the ball of radius `r` around the
/// canonical origin. `lipschitz_m` is the objective's Lipschitz constant and
/// only scales the reported target gap. `trace` enables per-step records.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn hk_solve(
    d: usize,
    kappa: f64,
    r: f64,
    eps: f64,
    lipschitz_m: f64,
    max_updates: usize,
    oracle: HkOracleFn,
    user: *mut c_void,
    out: *mut *mut HkResult,
) -> HkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = oracle.ok_or_else(|| null("oracle"))?;
        let cfg = SolverConfig::new(d, kappa, r, eps, lipschitz_m)?
            .with_trace(true)
            .with_max_queries((max_updates > 0).then_some(max_updates));
        let frame = LorentzFrame::canonical(d, kappa)?;
        let cb = CallbackOracle {
            f,
            user,
            failure: Cell::new(None),
        };
        match solve(&cfg, &frame, &cb) {
            Ok(inner) => {
                out.write(Box::into_raw(Box::new(HkResult { inner })));
                Ok(())
            }
            Err(e) => match cb.failure.get() {
                Some(code) => Err(Fail(HkStatus::OracleFailed, format!("oracle callback returned {code}"))),
                None => Err(e.into()),
            },
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hk_result_free(result: *mut HkResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

#[no_mangle]
pub unsafe extern "C" fn hk_result_best_value(result: *const HkResult, out: *mut f64) -> HkStatus {
    guard(|| write(out, handle(result, "result")?.inner.best_value, "out"))
}

/// Writes the best point (`d + 1` doubles).
#[no_mangle]
pub unsafe extern "C" fn hk_result_best_point(result: *const HkResult, out: *mut f64, len: usize) -> HkStatus {
    guard(|| {
        let p = handle(result, "result")?.inner.best_point.coords();
        if len != p.dim() + 1 {
            return Err(Error::DimensionMismatch {
                expected: p.dim() + 1,
                found: len,
            }
            .into());
        }
        output(out, len, "out")?.copy_from_slice(p.as_slice());
        Ok(())
    })
}

/// Oracle calls made.
#[no_mangle]
pub unsafe extern "C" fn hk_result_queries_used(result: *const HkResult, out: *mut usize) -> HkStatus {
    guard(|| write(out, handle(result, "result")?.inner.queries_used, "out"))
}

/// Localizer updates made.
#[no_mangle]
pub unsafe extern "C" fn hk_result_updates(result: *const HkResult, out: *mut usize) -> HkStatus {
    guard(|| write(out, handle(result, "result")?.inner.updates, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn hk_result_theorem_bound(result: *const HkResult, out: *mut u64) -> HkStatus {
    guard(|| write(out, handle(result, "result")?.inner.theorem_bound, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn hk_result_terminated_by(result: *const HkResult, out: *mut HkTermination) -> HkStatus {
    guard(|| {
        let t = match handle(result, "result")?.inner.terminated_by {
            Termination::Budget => HkTermination::Budget,
            Termination::ZeroSubgradient => HkTermination::ZeroSubgradient,
            Termination::Breakdown => HkTermination::Breakdown,
        };
        write(out, t, "out")
    })
}

/// Number of recorded steps.
#[no_mangle]
pub unsafe extern "C" fn hk_result_trace_len(result: *const HkResult, out: *mut usize) -> HkStatus {
    guard(|| write(out, handle(result, "result")?.inner.trace.len(), "out"))
}

/// Objective values of the feasible steps, in query order. Writes at most
/// `capacity` values and stores the total count in `count`.
#[no_mangle]
pub unsafe extern "C" fn hk_result_values(
    result: *const HkResult,
    out: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> HkStatus {
    guard(|| {
        let values: Vec<f64> = handle(result, "result")?
            .inner
            .trace
            .iter()
            .filter_map(|r| r.value)
            .collect();
        if capacity > 0 {
            let dst = output(out, capacity.min(values.len()), "out")?;
            dst.copy_from_slice(&values[..dst.len()]);
        }
        write(count, values.len(), "count")
    })
}
