//! Oscillatory quadrature for the extension operator and general phases, and norms.

mod norms;
mod phase;

pub use norms::{lorentz_norm, lp_norm, lq_norm};
pub use phase::{cutoff, Amplitude, CustomPoly, PhaseKind, PhaseSpec};

use crate::curve::Curve;
use crate::measure::{Provenance, QuadMeasure};
use crate::quadrature::gl16;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default cap on the phase increment per panel.
pub const PHASE_CAP: f64 = PI / 2.0;
/// Samples per segment used to bound the phase derivative.
pub const DERIV_SAMPLES: usize = 64;
/// Safety factor on the sampled phase-derivative bound.
pub const DERIV_SAFETY: f64 = 2.0;
/// Minimum number of panels per segment.
pub const MIN_PANELS: usize = 4;

/// Factor `exp(-i lambda x0 . gamma(t))` on a segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulation {
    pub x0: Vec<f64>,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub s: f64,
    pub e: f64,
    pub amp: Complex64,
    pub modulation: Option<Modulation>,
    pub sign: f64,
}

impl Segment {
    pub fn indicator(s: f64, e: f64) -> Self {
        Segment { s, e, amp: Complex64::new(1.0, 0.0), modulation: None, sign: 1.0 }
    }

    pub fn len(&self) -> f64 {
        self.e - self.s
    }

    pub fn is_empty(&self) -> bool {
        self.e <= self.s
    }

    /// Constant modulus of the segment.
    pub fn modulus(&self) -> f64 {
        self.amp.norm()
    }
}

/// Piecewise input on the parameter interval.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TestFunction {
    segments: Vec<Segment>,
}

impl TestFunction {
    pub fn new(mut segments: Vec<Segment>) -> Result<Self> {
        for sg in &segments {
            if !(sg.s.is_finite() && sg.e.is_finite()) || sg.e < sg.s {
                return Err(Error::Argument(format!("bad segment [{}, {}]", sg.s, sg.e)));
            }
            if !(sg.amp.re.is_finite() && sg.amp.im.is_finite()) {
                return Err(Error::Argument("non-finite amplitude".into()));
            }
            if sg.sign != 1.0 && sg.sign != -1.0 {
                return Err(Error::Argument("sign must be +1 or -1".into()));
            }
        }
        segments.sort_by(|a, b| a.s.total_cmp(&b.s));
        if segments.windows(2).any(|w| w[1].s < w[0].e) {
            return Err(Error::Argument("segments overlap".into()));
        }
        Ok(TestFunction { segments })
    }

    /// `chi_{[s, e]}`.
    pub fn indicator(s: f64, e: f64) -> Result<Self> {
        TestFunction::new(vec![Segment::indicator(s, e)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn support_length(&self) -> f64 {
        self.segments.iter().map(Segment::len).sum()
    }

    /// Convex hull of the support.
    pub fn hull(&self) -> Option<(f64, f64)> {
        let s = self.segments.iter().filter(|s| !s.is_empty());
        let lo = s.clone().map(|s| s.s).fold(f64::INFINITY, f64::min);
        let hi = s.map(|s| s.e).fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }

    /// Sum of two inputs with disjoint supports.
    pub fn plus(&self, other: &TestFunction) -> Result<Self> {
        let mut s = self.segments.clone();
        s.extend(other.segments.iter().cloned());
        TestFunction::new(s)
    }
}

/// `int_s^e a(t) exp(i phase(t)) dt` with panels resolving the phase.
pub fn osc_integral(s: f64, e: f64, cap: f64, phase: impl Fn(f64) -> f64, dphase: impl Fn(f64) -> f64, amp: impl Fn(f64) -> f64) -> Complex64 {
    osc_integral_counted(s, e, cap, phase, dphase, amp).0
}

/// [`osc_integral`] together with the number of panels used.
pub fn osc_integral_counted(
    s: f64,
    e: f64,
    cap: f64,
    phase: impl Fn(f64) -> f64,
    dphase: impl Fn(f64) -> f64,
    amp: impl Fn(f64) -> f64,
) -> (Complex64, usize) {
    if e <= s {
        return (Complex64::new(0.0, 0.0), 0);
    }
    let len = e - s;
    let mut sup: f64 = 0.0;
    for k in 0..DERIV_SAMPLES {
        let t = s + len * (k as f64 + 0.5) / DERIV_SAMPLES as f64;
        sup = sup.max(dphase(t).abs());
    }
    sup = sup.max(dphase(s).abs()).max(dphase(e).abs());
    let panels = ((DERIV_SAFETY * sup * len / cap).ceil() as usize).max(MIN_PANELS);
    let rule = gl16();
    let h = len / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = s + p as f64 * h;
        let mut part = Complex64::new(0.0, 0.0);
        for (t, w) in rule.mapped(a, a + h) {
            let (sn, cs) = phase(t).sin_cos();
            part += Complex64::new(cs, sn) * (w * amp(t));
        }
        acc += part;
    }
    (acc, panels)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integral of one segment against `exp(i (xi . gamma(t + shift) - mu . gamma(t) + c))`.
fn linear_segment(curve: &Curve, sg: &Segment, xi: &[f64], shift: f64, c: f64, cap: f64, amp_t: &dyn Fn(f64) -> f64) -> Result<(Complex64, usize)> {
    let d = curve.d();
    let mu: Option<Vec<f64>> = match &sg.modulation {
        None => None,
        Some(m) => {
            if m.x0.len() != d {
                return Err(Error::Argument(format!("modulation point has length {} (curve dimension {d})", m.x0.len())));
            }
            Some(m.x0.iter().map(|v| v * m.lambda).collect())
        }
    };
    let v = if shift == 0.0 {
        let eff: Vec<f64> = match &mu {
            None => xi.to_vec(),
            Some(mu) => xi.iter().zip(mu).map(|(a, b)| a - b).collect(),
        };
        let buf = std::cell::RefCell::new(vec![0.0; d]);
        osc_integral_counted(
            sg.s,
            sg.e,
            cap,
            |t| {
                let mut b = buf.borrow_mut();
                curve.derivative_into(t, 0, &mut b);
                dot(&eff, &b) + c
            },
            |t| {
                let mut b = buf.borrow_mut();
                curve.derivative_into(t, 1, &mut b);
                dot(&eff, &b)
            },
            amp_t,
        )
    } else {
        let buf = std::cell::RefCell::new(vec![0.0; d]);
        let val = |t: f64, order: usize| {
            let mut b = buf.borrow_mut();
            curve.derivative_into(t + shift, order, &mut b);
            let mut v = dot(xi, &b);
            if let Some(mu) = &mu {
                curve.derivative_into(t, order, &mut b);
                v -= dot(mu, &b);
            }
            v
        };
        osc_integral_counted(sg.s, sg.e, cap, |t| val(t, 0) + c, |t| val(t, 1), amp_t)
    };
    Ok((v.0 * sg.amp * sg.sign, v.1))
}

/// `T_lambda f(x) = int exp(i lambda x . gamma(t)) f(t) dt`.
pub fn extension_eval(curve: &Curve, lambda: f64, f: &TestFunction, x: &[f64]) -> Result<Complex64> {
    extension_eval_with(curve, lambda, f, x, PHASE_CAP)
}

/// [`extension_eval`] with an explicit phase-increment cap.
pub fn extension_eval_with(curve: &Curve, lambda: f64, f: &TestFunction, x: &[f64], cap: f64) -> Result<Complex64> {
    Ok(extension_eval_counted(curve, lambda, f, x, cap)?.0)
}

fn extension_eval_counted(curve: &Curve, lambda: f64, f: &TestFunction, x: &[f64], cap: f64) -> Result<(Complex64, usize)> {
    if x.len() != curve.d() {
        return Err(Error::Argument(format!("point has length {} (curve dimension {})", x.len(), curve.d())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("non-finite evaluation point".into()));
    }
    let xi: Vec<f64> = x.iter().map(|v| v * lambda).collect();
    let one = |_: f64| 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut panels = 0;
    for sg in f.segments() {
        let (v, n) = linear_segment(curve, sg, &xi, 0.0, 0.0, cap, &one)?;
        acc += v;
        panels += n;
    }
    Ok((acc, panels))
}

/// `int exp(i lambda Psi(y, t)) a(y, t) f(t) dt`.
pub fn phase_eval(phase: &PhaseSpec, lambda: f64, f: &TestFunction, y: &[f64]) -> Result<Complex64> {
    phase_eval_with(phase, lambda, f, y, PHASE_CAP)
}

/// [`phase_eval`] with an explicit phase-increment cap.
pub fn phase_eval_with(phase: &PhaseSpec, lambda: f64, f: &TestFunction, y: &[f64], cap: f64) -> Result<Complex64> {
    Ok(phase_eval_counted(phase, lambda, f, y, cap)?.0)
}

fn phase_eval_counted(phase: &PhaseSpec, lambda: f64, f: &TestFunction, y: &[f64], cap: f64) -> Result<(Complex64, usize)> {
    let ay = phase.amplitude.y_factor(y);
    if ay == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0));
    }
    let mut panels = 0;
    let amp_t = |t: f64| phase.amplitude.t_factor(t);
    let mut acc = Complex64::new(0.0, 0.0);
    match phase.linear_form(y)? {
        Some((w, shift, c0)) => {
            let curve = phase.curve.as_ref().expect("linear phases carry a curve");
            let xi: Vec<f64> = w.iter().map(|v| v * lambda).collect();
            for sg in f.segments() {
                let (v, n) = linear_segment(curve, sg, &xi, shift, lambda * c0, cap, &amp_t)?;
                acc += v;
                panels += n;
            }
        }
        None => {
            let PhaseKind::Custom(poly) = &phase.kind else { unreachable!() };
            for sg in f.segments() {
                if sg.modulation.is_some() {
                    return Err(Error::Argument("curve modulation needs a curve-based phase".into()));
                }
                let (v, n) = osc_integral_counted(sg.s, sg.e, cap, |t| lambda * poly.eval(y, t, 0), |t| lambda * poly.eval(y, t, 1), amp_t);
                acc += v * sg.amp * sg.sign;
                panels += n;
            }
        }
    }
    Ok((acc * ay, panels))
}

/// Which operator a field samples.
#[derive(Clone, Copy, Debug)]
pub enum Operator<'a> {
    Extension(&'a Curve),
    Phase(&'a PhaseSpec),
}

/// How to react to a measure that violates the lambda-spacing rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionPolicy {
    Warn,
    Strict,
}

/// Spatial bandwidth `lambda * max_t |gamma(t) - gamma(t_c)|` of `|T f|` over the support.
pub fn lambda_eff(curve: &Curve, lambda: f64, f: &TestFunction) -> f64 {
    let Some((lo, hi)) = f.hull() else { return 0.0 };
    let tc = 0.5 * (lo + hi);
    let c = curve.point(tc);
    let mut r: f64 = 0.0;
    for k in 0..=64 {
        let t = lo + (hi - lo) * k as f64 / 64.0;
        let p = curve.point(t);
        r = r.max(p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
    }
    lambda * r
}

/// Largest node spacing allowed for bandwidth `lam_eff` on `mu`.
pub fn required_spacing(mu: &QuadMeasure, lam_eff: f64) -> f64 {
    if lam_eff <= 0.0 {
        return f64::INFINITY;
    }
    if mu.provenance == Provenance::Sphere && mu.d() == 3 {
        1.0 / (8.0 * lam_eff)
    } else {
        2.0 * PI / (10.0 * lam_eff)
    }
}

/// Panel counts per node of a field evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PanelStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

/// Evaluate the operator at every node of `mu`, in node order.
pub fn field(op: Operator<'_>, lambda: f64, f: &TestFunction, mu: &QuadMeasure, policy: ResolutionPolicy) -> Result<Vec<Complex64>> {
    Ok(field_with_stats(op, lambda, f, mu, policy)?.0)
}

/// [`field`] together with the panel statistics.
pub fn field_with_stats(
    op: Operator<'_>,
    lambda: f64,
    f: &TestFunction,
    mu: &QuadMeasure,
    policy: ResolutionPolicy,
) -> Result<(Vec<Complex64>, PanelStats)> {
    let lam_eff = match op {
        Operator::Extension(c) => lambda_eff(c, lambda, f),
        Operator::Phase(p) => p.lambda_eff(lambda, f),
    };
    let need = required_spacing(mu, lam_eff);
    if mu.spacing > need {
        let msg = format!("node spacing {:.3e} exceeds {:.3e} required at lambda_eff = {:.1}", mu.spacing, need, lam_eff);
        match policy {
            ResolutionPolicy::Strict => return Err(Error::Resolution(msg)),
            ResolutionPolicy::Warn => log::warn!("{msg}"),
        }
    }
    let out: Vec<(Complex64, usize)> = (0..mu.len())
        .into_par_iter()
        .map(|i| match op {
            Operator::Extension(c) => extension_eval_counted(c, lambda, f, mu.node(i), PHASE_CAP),
            Operator::Phase(p) => phase_eval_counted(p, lambda, f, mu.node(i), PHASE_CAP),
        })
        .collect::<Result<_>>()?;
    let mut stats = PanelStats { min: usize::MAX, max: 0, mean: 0.0 };
    for &(_, n) in &out {
        stats.min = stats.min.min(n);
        stats.max = stats.max.max(n);
        stats.mean += n as f64;
    }
    if out.is_empty() {
        stats.min = 0;
    } else {
        stats.mean /= out.len() as f64;
    }
    Ok((out.into_iter().map(|v| v.0).collect(), stats))
}
