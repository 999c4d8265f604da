use super::TestFunction;
use crate::measure::QuadMeasure;
use crate::{Error, Result};
use num_complex::Complex64;

/// `(sum w_i |F_i|^q)^{1/q}`, or `max |F_i|` for `q = inf`. Summed in node order.
pub fn lq_norm(field: &[Complex64], mu: &QuadMeasure, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Argument(format!("q = {q} must be at least 1")));
    }
    if field.len() != mu.len() {
        return Err(Error::Argument(format!("field has {} values for {} nodes", field.len(), mu.len())));
    }
    if q.is_infinite() {
        return Ok(field.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let s: f64 = field.iter().zip(mu.weights()).map(|(z, w)| w * z.norm().powf(q)).sum();
    Ok(s.powf(1.0 / q))
}

/// `L^p(I)` norm of a piecewise constant-modulus input.
pub fn lp_norm(f: &TestFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Argument(format!("p = {p} must be at least 1")));
    }
    let live = f.segments().iter().filter(|s| !s.is_empty());
    if p.is_infinite() {
        return Ok(live.map(|s| s.modulus()).fold(0.0, f64::max));
    }
    let s: f64 = live.map(|s| s.modulus().powf(p) * s.len()).sum();
    Ok(s.powf(1.0 / p))
}

/// `(int_0^inf (t^{1/p} f*(t))^q dt / t)^{1/q}`, exact on the piecewise constant rearrangement.
pub fn lorentz_norm(f: &TestFunction, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::Argument(format!("Lorentz exponents ({p}, {q}) must be at least 1")));
    }
    if p.is_infinite() && q.is_finite() {
        return Err(Error::Argument("Lorentz norm with p = inf needs q = inf".into()));
    }
    let mut pieces: Vec<(f64, f64)> = f
        .segments()
        .iter()
        .filter(|s| !s.is_empty() && s.modulus() > 0.0)
        .map(|s| (s.modulus(), s.len()))
        .collect();
    pieces.sort_by(|a, b| b.0.total_cmp(&a.0));
    if p.is_infinite() {
        return Ok(pieces.first().map_or(0.0, |x| x.0));
    }
    let mut cum = 0.0;
    if q.is_infinite() {
        let mut best: f64 = 0.0;
        for (a, len) in pieces {
            cum += len;
            best = best.max(a * cum.powf(1.0 / p));
        }
        return Ok(best);
    }
    let r = q / p;
    let mut s = 0.0;
    for (a, len) in pieces {
        let next = cum + len;
        s += a.powf(q) * (next.powf(r) - cum.powf(r)) / r;
        cum = next;
    }
    Ok(s.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Segment;

    #[test]
    fn indicator_lorentz_closed_form() {
        let f = TestFunction::indicator(0.2, 0.45).unwrap();
        let (p, q) = (1.5, 3.0);
        let v = lorentz_norm(&f, p, q).unwrap();
        let exact = (p / q).powf(1.0 / q) * 0.25f64.powf(1.0 / p);
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn lorentz_diagonal_is_lp() {
        let mut seg = Vec::new();
        for (k, a) in [0.3, 2.0, 1.1, 0.7].iter().enumerate() {
            let mut s = Segment::indicator(0.2 * k as f64, 0.2 * k as f64 + 0.05 * (k + 1) as f64);
            s.amp = Complex64::new(*a, 0.5);
            seg.push(s);
        }
        let f = TestFunction::new(seg).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((lorentz_norm(&f, p, p).unwrap() - lp_norm(&f, p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn infinite_p_finite_q_rejected() {
        let f = TestFunction::indicator(0.0, 1.0).unwrap();
        assert!(lorentz_norm(&f, f64::INFINITY, 2.0).is_err());
    }
}
