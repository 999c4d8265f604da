//! Exact parsing of decimal and fractional literals.

use crate::{Error, Result};
use num_rational::Rational64;

/// Parse `-1.25`, `3`, `1/6`, `2.5e-3` exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Config(format!("not a number: '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d == Rational64::from_integer(0) {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac.len() as i32;
    let ten = Rational64::from_integer(10);
    let mut r = Rational64::from_integer(num);
    if scale >= 0 {
        r *= num_traits::pow(ten, scale as usize);
    } else {
        r /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -r } else { r })
}

/// Rational to f64.
pub fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn from_f64(x: f64, max_den: i64) -> Rational64 {
    Rational64::approximate_float(x)
        .filter(|r| *r.denom() <= max_den && (to_f64(*r) - x).abs() <= 1e-12 * x.abs().max(1.0))
        .unwrap_or_else(|| {
            let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
            let mut v = x;
            for _ in 0..64 {
                let a = v.floor();
                let ai = a as i64;
                let p2 = ai * p1 + p0;
                let q2 = ai * q1 + q0;
                if q2 > max_den {
                    break;
                }
                p0 = p1;
                q0 = q1;
                p1 = p2;
                q1 = q2;
                let f = v - a;
                if f.abs() < 1e-15 {
                    break;
                }
                v = 1.0 / f;
            }
            Rational64::new(p1, q1.max(1))
        })
}
