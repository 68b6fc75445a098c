//! C ABI over the pantograph library: opaque spec handles, plain structs for
//! results, and integer status codes mirroring the CLI exit contract.
//!
//! Every function returns a [`PantographStatus`] code and writes results
//! through out-pointers; nothing panics across the boundary. The header is
//! generated into `include/pantograph.h` at build time.

#![allow(clippy::missing_safety_doc)]

use std::os::raw::c_char;

use pantograph::djm::{self, DelayRhs};
use pantograph::error::Error;
use pantograph::fractional::{self, FractionalOrder};
use pantograph::rk4;
use pantograph::series;
use pantograph::spec::DelaySpec;
use pantograph::stability::{self, FrozenDelays, Verdict, Window};

/// Status codes; `Ok` is zero, everything else names the failure class.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PantographStatus {
    Ok = 0,
    /// A pointer argument was null or an enum value out of range.
    Usage = 1,
    /// A precondition on the numeric inputs failed.
    Domain = 2,
    /// The tolerance was not reachable within the term budget.
    Truncation = 3,
    /// An iterate escaped the convergence rectangle.
    RectangleEscape = 4,
    /// An intermediate value left the representable range.
    Range = 5,
    /// The iteration ran out of sweeps before reaching the tolerance.
    NonConvergence = 6,
    /// The marching integrator produced a non-finite state.
    Blowup = 7,
}

fn status_of(e: &Error) -> PantographStatus {
    match e {
        Error::Domain(_) => PantographStatus::Domain,
        Error::Truncation { .. } => PantographStatus::Truncation,
        Error::Range { .. } => PantographStatus::Range,
        Error::RectangleEscape { .. } => PantographStatus::RectangleEscape,
        Error::NonConvergence { .. } => PantographStatus::NonConvergence,
        Error::Blowup { .. } => PantographStatus::Blowup,
        Error::Parse { .. } => PantographStatus::Usage,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn pantograph_status_message(status: PantographStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        PantographStatus::Ok => b"ok\0",
        PantographStatus::Usage => b"usage error: null pointer or invalid enum value\0",
        PantographStatus::Domain => b"domain error: a precondition on the inputs failed\0",
        PantographStatus::Truncation => {
            b"truncation error: tolerance not reachable in the term budget\0"
        }
        PantographStatus::RectangleEscape => b"iterate escaped the convergence rectangle\0",
        PantographStatus::Range => b"range error: intermediate value became non-finite\0",
        PantographStatus::NonConvergence => b"iteration did not converge within the sweep budget\0",
        PantographStatus::Blowup => b"solution blew up\0",
    };
    msg.as_ptr() as *const c_char
}

/// Opaque handle for a validated (a, q) pair.
pub struct PantographSpec {
    inner: DelaySpec,
}

/// A truncated series evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PantographSeriesValue {
    pub value: f64,
    pub terms_used: u64,
    pub tail_bound: f64,
}

/// Builds a spec handle from coefficient and ratio arrays of length `len`.
/// On success writes the handle to `out`; free it with
/// [`pantograph_spec_free`].
#[no_mangle]
pub unsafe extern "C" fn pantograph_spec_new(
    a: *const f64,
    q: *const f64,
    len: usize,
    out: *mut *mut PantographSpec,
) -> PantographStatus {
    if a.is_null() || q.is_null() || out.is_null() || len == 0 {
        return PantographStatus::Usage;
    }
    let a = std::slice::from_raw_parts(a, len).to_vec();
    let q = std::slice::from_raw_parts(q, len).to_vec();
    match DelaySpec::new(a, q) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(PantographSpec { inner: spec }));
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn pantograph_spec_free(spec: *mut PantographSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

unsafe fn spec_ref<'a>(spec: *const PantographSpec) -> Option<&'a DelaySpec> {
    spec.as_ref().map(|s| &s.inner)
}

fn write_series(out: *mut PantographSeriesValue, v: series::SeriesValue) {
    unsafe {
        *out = PantographSeriesValue {
            value: v.value,
            terms_used: v.terms_used as u64,
            tail_bound: v.tail_bound,
        };
    }
}

/// Evaluates the series solution at `x` with tail bound at most `tol`.
#[no_mangle]
pub unsafe extern "C" fn pantograph_eval(
    spec: *const PantographSpec,
    x: f64,
    tol: f64,
    out: *mut PantographSeriesValue,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    match series::eval(spec, x, tol) {
        Ok(v) => {
            write_series(out, v);
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The r-th derivative of the series solution at `x`.
#[no_mangle]
pub unsafe extern "C" fn pantograph_eval_derivative(
    spec: *const PantographSpec,
    x: f64,
    r: u32,
    tol: f64,
    out: *mut PantographSeriesValue,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    match series::eval_derivative(spec, x, r as usize, tol) {
        Ok(v) => {
            write_series(out, v);
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The coefficient product c_m (1 when m = 0).
#[no_mangle]
pub unsafe extern "C" fn pantograph_coefficient_product(
    spec: *const PantographSpec,
    m: u64,
    out: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    match series::coefficient_product(spec, m as usize) {
        Ok(v) => {
            *out = v;
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Rebuilds the solution at x + y from `outer_terms + 1` derivative values
/// at y; the tail bound covers the distance to the true value at x + y.
#[no_mangle]
pub unsafe extern "C" fn pantograph_eval_addition(
    spec: *const PantographSpec,
    x: f64,
    y: f64,
    outer_terms: u32,
    tol: f64,
    out: *mut PantographSeriesValue,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    match series::eval_addition(spec, x, y, outer_terms as usize, tol) {
        Ok(v) => {
            write_series(out, v);
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Sums the series at the complex argument re + i im and writes the real
/// and imaginary parts of the result.
#[no_mangle]
pub unsafe extern "C" fn pantograph_eval_complex(
    spec: *const PantographSpec,
    re: f64,
    im: f64,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out_re.is_null() || out_im.is_null()) else {
        return PantographStatus::Usage;
    };
    match series::eval_complex(spec, series::ComplexValue::new(re, im), tol) {
        Ok(v) => {
            *out_re = v.re;
            *out_im = v.im;
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The exponential sandwich (lower, upper) enclosing the solution for
/// nonnegative coefficients and x >= 0.
#[no_mangle]
pub unsafe extern "C" fn pantograph_sandwich_bounds(
    spec: *const PantographSpec,
    x: f64,
    out_lower: *mut f64,
    out_upper: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out_lower.is_null() || out_upper.is_null()) else {
        return PantographStatus::Usage;
    };
    match series::sandwich_bounds(spec, x) {
        Ok((lo, hi)) => {
            *out_lower = lo;
            *out_upper = hi;
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// ln Gamma(x) for x > 0.
#[no_mangle]
pub unsafe extern "C" fn pantograph_log_gamma(x: f64, out: *mut f64) -> PantographStatus {
    if out.is_null() {
        return PantographStatus::Usage;
    }
    match fractional::log_gamma(x) {
        Ok(v) => {
            *out = v;
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The Mittag-Leffler function E_alpha(x).
#[no_mangle]
pub unsafe extern "C" fn pantograph_mittag_leffler(
    alpha: f64,
    x: f64,
    tol: f64,
    out: *mut PantographSeriesValue,
) -> PantographStatus {
    if out.is_null() {
        return PantographStatus::Usage;
    }
    let order = match FractionalOrder::new(alpha) {
        Ok(o) => o,
        Err(e) => return status_of(&e),
    };
    match fractional::mittag_leffler(order, x, tol) {
        Ok(v) => {
            write_series(out, v);
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The fractional-order series solution at x >= 0.
#[no_mangle]
pub unsafe extern "C" fn pantograph_eval_frac(
    spec: *const PantographSpec,
    alpha: f64,
    x: f64,
    tol: f64,
    out: *mut PantographSeriesValue,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    let order = match FractionalOrder::new(alpha) {
        Ok(o) => o,
        Err(e) => return status_of(&e),
    };
    match fractional::eval_frac(spec, order, x, tol) {
        Ok(v) => {
            write_series(out, v);
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Max-norm residual of the Caputo equation under the L1 scheme on an
/// N-interval grid over [0, b], for 0 < alpha < 1.
#[no_mangle]
pub unsafe extern "C" fn pantograph_caputo_l1_residual(
    spec: *const PantographSpec,
    alpha: f64,
    b: f64,
    n: usize,
    out: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    let order = match FractionalOrder::new(alpha) {
        Ok(o) => o,
        Err(e) => return status_of(&e),
    };
    match fractional::caputo_l1_residual(spec, order, b, n) {
        Ok(v) => {
            *out = v;
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Marches RK4 to b with N steps and writes the N+1 node values into
/// `out_values` (capacity must be at least N+1).
#[no_mangle]
pub unsafe extern "C" fn pantograph_integrate_rk4(
    spec: *const PantographSpec,
    b: f64,
    n: usize,
    out_values: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out_values.is_null()) else {
        return PantographStatus::Usage;
    };
    if n == 0 {
        return PantographStatus::Usage;
    }
    match rk4::integrate(spec, b, b / n as f64) {
        Ok(sol) => {
            let out = std::slice::from_raw_parts_mut(out_values, n + 1);
            out.copy_from_slice(sol.values());
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Observed RK4 convergence order against the series value at b; infinity
/// when both measured errors sit at rounding level.
#[no_mangle]
pub unsafe extern "C" fn pantograph_rk4_convergence_order(
    spec: *const PantographSpec,
    b: f64,
    out: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (spec_ref(spec), out.is_null()) else {
        return PantographStatus::Usage;
    };
    match rk4::convergence_order(spec, b) {
        Ok(p) => {
            *out = p;
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Runs the successive-approximation solver for the linear problem on an
/// N-interval grid; writes the N+1 node values and the certified remainder.
#[no_mangle]
pub unsafe extern "C" fn pantograph_djm_solve(
    spec: *const PantographSpec,
    b: f64,
    n: usize,
    tol: f64,
    max_iter: usize,
    out_values: *mut f64,
    out_certified_error: *mut f64,
) -> PantographStatus {
    let (Some(spec), false) = (
        spec_ref(spec),
        out_values.is_null() || out_certified_error.is_null(),
    ) else {
        return PantographStatus::Usage;
    };
    if n == 0 {
        return PantographStatus::Usage;
    }
    let rhs = match DelayRhs::linear(spec, b) {
        Ok(r) => r,
        Err(e) => return status_of(&e),
    };
    match djm::djm_iterate(&rhs, 1.0, n, max_iter, tol) {
        Ok(sol) => {
            let out = std::slice::from_raw_parts_mut(out_values, n + 1);
            out.copy_from_slice(sol.values());
            *out_certified_error = sol.certified_error().unwrap_or(f64::NAN);
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Stability verdict codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PantographVerdict {
    StableOnFiniteInterval = 0,
    Unstable = 1,
    Inconclusive = 2,
}

/// Frozen-delay stability search. Lags come from the spec frozen at `x0`.
/// Up to `roots_capacity` roots are written as (re, im) pairs into
/// `out_roots`; `out_root_count` receives the number found (which may
/// exceed the capacity; only the leading ones are written).
#[no_mangle]
pub unsafe extern "C" fn pantograph_stability(
    spec: *const PantographSpec,
    x0: f64,
    re_min: f64,
    re_max: f64,
    im_max: f64,
    grid: usize,
    out_verdict: *mut PantographVerdict,
    out_max_real_part: *mut f64,
    out_roots: *mut f64,
    roots_capacity: usize,
    out_root_count: *mut usize,
) -> PantographStatus {
    let (Some(spec), false) = (
        spec_ref(spec),
        out_verdict.is_null() || out_max_real_part.is_null() || out_root_count.is_null(),
    ) else {
        return PantographStatus::Usage;
    };
    if roots_capacity > 0 && out_roots.is_null() {
        return PantographStatus::Usage;
    }
    let frozen = match FrozenDelays::from_spec(spec, x0) {
        Ok(f) => f,
        Err(e) => return status_of(&e),
    };
    let window = Window {
        re_min,
        re_max,
        im_max,
    };
    match stability::find_roots(&frozen, window, grid) {
        Ok(report) => {
            *out_verdict = match report.verdict {
                Verdict::StableOnFiniteInterval => PantographVerdict::StableOnFiniteInterval,
                Verdict::Unstable => PantographVerdict::Unstable,
                Verdict::Inconclusive => PantographVerdict::Inconclusive,
            };
            *out_max_real_part = report.max_real_part;
            *out_root_count = report.roots.len();
            if roots_capacity > 0 {
                let out = std::slice::from_raw_parts_mut(out_roots, roots_capacity * 2);
                for (i, r) in report.roots.iter().take(roots_capacity).enumerate() {
                    out[2 * i] = r.re;
                    out[2 * i + 1] = r.im;
                }
            }
            PantographStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}
