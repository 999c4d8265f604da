//! C ABI over the `rlab` core.
//!
//! Objects are opaque handles created by the constructors and
//! released with the matching `*_free`. Every fallible call returns an
//! [`RlabStatus`]; on failure `rlab_last_error` describes the cause for the
//! calling thread.

use num_rational::Rational64;
use rlab::curve::Curve;
use rlab::engine::{extension_eval, field, lq_norm, Operator, ResolutionPolicy, TestFunction};
use rlab::exponents::{hyperplane_omega, sphere_region};
use rlab::measure::{dimension_audit, hyperplane_measure, singular_alpha_measure, sphere_measure, QuadMeasure};
use rlab::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Panic = 5,
}

/// Exact rational `num / den` with `den > 0`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RlabRational {
    pub num: i64,
    pub den: i64,
}

/// Opaque curve handle.
pub struct RlabCurve(Curve);

/// Opaque quadrature-measure handle.
pub struct RlabMeasure(QuadMeasure);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RlabStatus {
    match e {
        Error::Argument(_) | Error::Domain(_) => RlabStatus::InvalidArgument,
        Error::Config(_) | Error::Io(_) => RlabStatus::Config,
        _ => RlabStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (RlabStatus, String)>) -> RlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RlabStatus::Ok
        }
        Ok(Err((s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            RlabStatus::Panic
        }
    }
}

fn lift<T>(r: rlab::Result<T>) -> Result<T, (RlabStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (RlabStatus, String) {
    (RlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RlabStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], (RlabStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (RlabStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn rational(r: Rational64) -> RlabRational {
    RlabRational { num: *r.numer(), den: *r.denom() }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Moment curve `(t, t^2/2, ..., t^d/d!)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn rlab_curve_moment(d: usize, out: *mut *mut RlabCurve) -> RlabStatus {
    guard(|| {
        if d < 2 {
            return Err((RlabStatus::InvalidArgument, "d must be at least 2".into()));
        }
        write(out, Box::into_raw(Box::new(RlabCurve(Curve::moment(d)))), "out")
    })
}

/// Curve from a spec such as `poly([[0,1],[0,0,1/2]])` or `monomial(1,3)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_curve_parse(spec: *const c_char, out: *mut *mut RlabCurve) -> RlabStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        let s = CStr::from_ptr(spec).to_str().map_err(|_| (RlabStatus::InvalidArgument, "spec is not UTF-8".to_string()))?;
        let c = lift(Curve::parse(s))?;
        write(out, Box::into_raw(Box::new(RlabCurve(c))), "out")
    })
}

/// # Safety
/// `curve` must come from a curve constructor and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rlab_curve_free(curve: *mut RlabCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlab_curve_dim(curve: *const RlabCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.d())
}

/// `det(gamma'(t), ..., gamma^(d)(t))`.
///
/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_curve_torsion(curve: *const RlabCurve, t: f64, out: *mut f64) -> RlabStatus {
    guard(|| {
        let c = deref(curve, "curve")?;
        write(out, lift(c.0.torsion_det(t))?, "out")
    })
}

/// Circle (`d = 2`) or two-sphere (`d = 3`) surface measure.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_measure_sphere(d: usize, resolution: usize, out: *mut *mut RlabMeasure) -> RlabStatus {
    guard(|| {
        let m = lift(sphere_measure(d, resolution))?;
        write(out, Box::into_raw(Box::new(RlabMeasure(m))), "out")
    })
}

/// Alpha-dimensional singular measure in the unit ball.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_measure_singular(d: usize, alpha: f64, resolution: usize, out: *mut *mut RlabMeasure) -> RlabStatus {
    guard(|| {
        let m = lift(singular_alpha_measure(d, alpha, resolution))?;
        write(out, Box::into_raw(Box::new(RlabMeasure(m))), "out")
    })
}

/// Hyperplane `normal . x = 0` over the cube of half-size `extent` in its chart.
///
/// # Safety
/// `normal` must point to `d` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_measure_hyperplane(
    normal: *const f64,
    d: usize,
    extent: f64,
    resolution: usize,
    out: *mut *mut RlabMeasure,
) -> RlabStatus {
    guard(|| {
        let n = slice(normal, d, "normal")?;
        let m = lift(hyperplane_measure(n, extent, resolution))?;
        write(out, Box::into_raw(Box::new(RlabMeasure(m))), "out")
    })
}

/// # Safety
/// `measure` must come from a measure constructor and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rlab_measure_free(measure: *mut RlabMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `measure` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlab_measure_len(measure: *const RlabMeasure) -> usize {
    measure.as_ref().map_or(0, |m| m.0.len())
}

/// Total mass of the measure.
///
/// # Safety
/// `measure` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_measure_mass(measure: *const RlabMeasure, out: *mut f64) -> RlabStatus {
    guard(|| {
        let m = deref(measure, "measure")?;
        write(out, m.0.total_mass(), "out")
    })
}

/// Monte Carlo estimate of `sup mu(B(x, r)) / r^alpha`.
///
/// # Safety
/// `measure` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_dimension_audit(measure: *const RlabMeasure, alpha: f64, samples: usize, seed: u64, out: *mut f64) -> RlabStatus {
    guard(|| {
        let m = deref(measure, "measure")?;
        write(out, lift(dimension_audit(&m.0, alpha, samples, seed))?, "out")
    })
}

/// `T_lambda chi_[s,e](x)`; writes the real and imaginary parts.
///
/// # Safety
/// `x` must point to `x_len` doubles; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_extension_eval(
    curve: *const RlabCurve,
    lambda: f64,
    s: f64,
    e: f64,
    x: *const f64,
    x_len: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> RlabStatus {
    guard(|| {
        let c = deref(curve, "curve")?;
        let x = slice(x, x_len, "x")?;
        let f = lift(TestFunction::indicator(s, e))?;
        let v = lift(extension_eval(&c.0, lambda, &f, x))?;
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// `|| T_lambda chi_[s,e] ||_{L^q(mu)}`; `q = INFINITY` gives the maximum.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_extension_lq_norm(
    curve: *const RlabCurve,
    measure: *const RlabMeasure,
    lambda: f64,
    s: f64,
    e: f64,
    q: f64,
    out: *mut f64,
) -> RlabStatus {
    guard(|| {
        let c = deref(curve, "curve")?;
        let m = deref(measure, "measure")?;
        if c.0.d() != m.0.d() {
            return Err((RlabStatus::InvalidArgument, "curve and measure dimensions differ".into()));
        }
        let f = lift(TestFunction::indicator(s, e))?;
        let fld = lift(field(Operator::Extension(&c.0), lambda, &f, &m.0, ResolutionPolicy::Warn))?;
        write(out, lift(lq_norm(&fld, &m.0, q))?, "out")
    })
}

/// Threshold `q_c = (d^2+d)/2` and line coefficient `(d^2+d-2)/2` for the sphere.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_exponents_sphere(d: usize, q_threshold: *mut RlabRational, line_coef: *mut RlabRational) -> RlabStatus {
    guard(|| {
        let r = lift(sphere_region(d))?;
        write(q_threshold, rational(r.q_threshold), "q_threshold")?;
        write(line_coef, rational(r.line_coef.expect("sphere region has a line")), "line_coef")
    })
}

/// Index `omega` of the hyperplane with rational normal `num[i] / den[i]`.
///
/// # Safety
/// `num` and `den` must point to `d` readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_hyperplane_omega(num: *const i64, den: *const i64, d: usize, out: *mut u32) -> RlabStatus {
    guard(|| {
        let n = slice(num, d, "num")?;
        let dd = slice(den, d, "den")?;
        if dd.contains(&0) {
            return Err((RlabStatus::InvalidArgument, "zero denominator".into()));
        }
        let c: Vec<Rational64> = n.iter().zip(dd).map(|(a, b)| Rational64::new(*a, *b)).collect();
        write(out, lift(hyperplane_omega(&c, d))?, "out")
    })
}
