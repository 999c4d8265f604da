//! Closed-form exponent arithmetic in exact rationals.

use crate::curve::{Curve, TypeTuple, DET_TOL};
use crate::rational::to_f64;
use crate::{Error, Result};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// A point `(1/p, 1/q)` of the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentPoint {
    pub inv_p: Q,
    pub inv_q: Q,
}

impl ExponentPoint {
    pub fn new(inv_p: Q, inv_q: Q) -> Result<Self> {
        let unit = |v: Q| v >= Q::zero() && v <= Q::one();
        if !unit(inv_p) || !unit(inv_q) {
            return Err(Error::Argument(format!("({inv_p}, {inv_q}) outside the unit square")));
        }
        Ok(ExponentPoint { inv_p, inv_q })
    }

    /// From exponents `p, q`, with `None` meaning infinity.
    pub fn from_pq(p: Option<Q>, q: Option<Q>) -> Result<Self> {
        let inv = |v: Option<Q>| v.map_or(Ok(Q::zero()), |v| if v.is_zero() { Err(Error::Argument("zero exponent".into())) } else { Ok(v.recip()) });
        ExponentPoint::new(inv(p)?, inv(q)?)
    }
}

/// Ceiling of a rational.
pub fn ceil_of(nu: Q) -> i64 {
    nu.ceil().to_integer()
}

/// `kappa(a, alpha)` for `alpha` in `(0, d]`.
pub fn kappa(a: &TypeTuple, alpha: Q) -> Result<Q> {
    let d = a.d() as i64;
    if alpha <= Q::zero() || alpha > q(d) {
        return Err(Error::Argument(format!("alpha = {alpha} outside (0, {d}]")));
    }
    let m = ceil_of(alpha);
    let a = a.as_slice();
    // 1-based index d - m + 1
    let lead = q(a[(d - m) as usize] as i64);
    let tail: i64 = a[(d - m + 1) as usize..].iter().map(|&v| v as i64).sum();
    Ok((alpha + Q::one() - q(m)) * lead + q(tail))
}

/// `beta(alpha) = kappa((1, ..., d), alpha)`.
pub fn beta(d: usize, alpha: Q) -> Result<Q> {
    kappa(&TypeTuple::standard(d), alpha)
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionKind {
    SphereNondegenerate { d: usize },
    FiniteType { d: usize, kappa_max: Q },
    Hyperplane { d: usize, omega: u32 },
    Kdim { d: usize, k: usize },
    AlphaGeneral { d: usize, a: TypeTuple, alpha: Q },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionClass {
    Interior,
    Boundary,
    Exterior,
}

impl std::fmt::Display for RegionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegionClass::Interior => "interior",
            RegionClass::Boundary => "boundary",
            RegionClass::Exterior => "exterior",
        })
    }
}

/// An exponent region `q > q_threshold`, `1/p + line_coef/q < 1` with boundary conventions.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub kind: RegionKind,
    pub q_threshold: Q,
    /// `None` for regions constrained only through `q`.
    pub line_coef: Option<Q>,
    /// Whether the critical line (with `q` above threshold) belongs to the proven range.
    pub line_included: bool,
    /// Whether `q < q_threshold` is known to fail.
    pub q_necessary: bool,
}

impl Region {
    /// Geometric classification of a point.
    pub fn classify(&self, pt: ExponentPoint) -> RegionClass {
        let thr_inv = self.q_threshold.recip();
        let q_side = pt.inv_q.cmp(&thr_inv);
        let line = self.line_coef.map(|c| pt.inv_p + c * pt.inv_q - Q::one());
        use std::cmp::Ordering::*;
        let line_side = line.map_or(Less, |l| l.cmp(&Q::zero()));
        if q_side == Greater || line_side == Greater {
            RegionClass::Exterior
        } else if q_side == Less && line_side == Less {
            RegionClass::Interior
        } else {
            RegionClass::Boundary
        }
    }

    /// `Some(true)` where the estimate is established, `Some(false)` where it fails, `None` if open.
    pub fn estimate_holds(&self, pt: ExponentPoint) -> Option<bool> {
        let thr_inv = self.q_threshold.recip();
        let line = self.line_coef.map(|c| pt.inv_p + c * pt.inv_q - Q::one());
        if line.is_some_and(|l| l > Q::zero()) {
            return Some(false);
        }
        if pt.inv_q > thr_inv {
            return if self.q_necessary { Some(false) } else { None };
        }
        if pt.inv_q == thr_inv && matches!(self.kind, RegionKind::Hyperplane { .. }) {
            return Some(false);
        }
        if matches!(self.kind, RegionKind::Kdim { .. }) {
            return None;
        }
        if pt.inv_q < thr_inv {
            match line {
                Some(l) if l < Q::zero() => return Some(true),
                Some(_) if self.line_included => return Some(true),
                None => return Some(true),
                _ => {}
            }
        }
        None
    }
}

/// Sharp region for nondegenerate curves restricted to the sphere.
pub fn sphere_region(d: usize) -> Result<Region> {
    if d < 2 {
        return Err(Error::Argument("d must be at least 2".into()));
    }
    let n = (d * d + d) as i64;
    Ok(Region {
        kind: RegionKind::SphereNondegenerate { d },
        q_threshold: Q::new(n, 2),
        line_coef: Some(Q::new(n - 2, 2)),
        line_included: false,
        q_necessary: true,
    })
}

/// Region for finite-type curves; the critical line is included.
pub fn finite_type_region(kappa_max: Q, d: usize) -> Result<Region> {
    if d < 2 {
        return Err(Error::Argument("d must be at least 2".into()));
    }
    let n = (d * d + d) as i64;
    if kappa_max < Q::new(n - 2, 2) {
        return Err(Error::Argument(format!("kappa_max = {kappa_max} below the nondegenerate value")));
    }
    Ok(Region {
        kind: RegionKind::FiniteType { d, kappa_max },
        q_threshold: Q::new(n, 2),
        line_coef: Some(kappa_max),
        line_included: true,
        q_necessary: false,
    })
}

/// Characterised region for the moment curve restricted to a hyperplane.
pub fn hyperplane_region(d: usize, omega: u32) -> Result<Region> {
    if omega as usize > d.saturating_sub(1) {
        return Err(Error::Argument(format!("omega = {omega} outside [0, d-1]")));
    }
    let base = (d * (d - 1) / 2) as i64;
    Ok(Region {
        kind: RegionKind::Hyperplane { d, omega },
        q_threshold: q(base + 1),
        line_coef: Some(q(base + omega as i64)),
        line_included: true,
        q_necessary: true,
    })
}

/// Necessary condition `q >= (2d-k+1)k/2 + 1` for k-dimensional submanifolds.
pub fn kdim_region(d: usize, k: usize) -> Result<Region> {
    Ok(Region {
        kind: RegionKind::Kdim { d, k },
        q_threshold: kdim_threshold(d, k)?,
        line_coef: None,
        line_included: false,
        q_necessary: true,
    })
}

/// Region for alpha-dimensional measures and a finite-type tuple.
pub fn alpha_region(a: &TypeTuple, alpha: Q) -> Result<Region> {
    let d = a.d();
    let k = kappa(a, alpha)?;
    Ok(Region {
        kind: RegionKind::AlphaGeneral { d, a: a.clone(), alpha },
        q_threshold: beta(d, alpha)? + Q::one(),
        line_coef: Some(k),
        line_included: true,
        q_necessary: false,
    })
}

/// `(2d - k + 1) k / 2 + 1`.
pub fn kdim_threshold(d: usize, k: usize) -> Result<Q> {
    if k < 2 || k + 1 > d {
        return Err(Error::Argument(format!("k = {k} must satisfy 2 <= k <= d-1 (d = {d})")));
    }
    Ok(Q::new(((2 * d - k + 1) * k) as i64, 2) + Q::one())
}

/// Chart of the hyperplane `c . x = 0` and the projected moment curve.
#[derive(Clone, Debug)]
pub struct HyperplaneChart {
    /// Zero-based index of the graph coordinate.
    pub k: usize,
    /// Coefficients of `x_k = h . xbar`.
    pub h: Vec<Q>,
    pub curve: Curve,
}

fn factorial_i64(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Project the moment curve onto the hyperplane with normal `c`.
pub fn hyperplane_project(c: &[Q], d: usize) -> Result<HyperplaneChart> {
    if c.len() != d {
        return Err(Error::Argument(format!("normal has length {} but d = {d}", c.len())));
    }
    if c.iter().all(Zero::is_zero) {
        return Err(Error::Argument("zero normal".into()));
    }
    let mut k = 0;
    for i in 1..d {
        if c[i].abs() > c[k].abs() {
            k = i;
        }
    }
    let h: Vec<Q> = (0..d).filter(|&i| i != k).map(|i| -c[i] / c[k]).collect();
    let deg = d + 1;
    let mut rows = Vec::with_capacity(d - 1);
    for (j, i) in (0..d).filter(|&i| i != k).enumerate() {
        let mut row = vec![Q::zero(); deg];
        row[i + 1] += Q::new(1, factorial_i64(i + 1));
        row[k + 1] += h[j] * Q::new(1, factorial_i64(k + 1));
        rows.push(row);
    }
    let curve = Curve::polynomial_exact(rows)?;
    Ok(HyperplaneChart { k, h, curve })
}

/// `omega = max_t |a(t)|_1 - d(d-1)/2` for the projected curve.
pub fn hyperplane_omega(c: &[Q], d: usize) -> Result<u32> {
    let chart = hyperplane_project(c, d)?;
    let scan = chart.curve.type_scan(512, 2 * d as u32, DET_TOL)?;
    let base = (d * (d - 1) / 2) as u32;
    Ok(scan.norm_max() - base)
}

/// Extremal input families.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Knapp,
    Random,
    AlphaRect { a: TypeTuple, alpha: Q, rho: Q },
}

/// Predicted excess slope of the normalised ratio in `log lambda`.
pub fn predicted_excess(pt: ExponentPoint, family: &Family, d: usize) -> Result<Q> {
    let dd = d as i64;
    let two_d = q(2 * dd);
    Ok(match family {
        Family::Knapp => (pt.inv_p + Q::new(dd * dd + dd - 2, 2) * pt.inv_q - Q::one()) / two_d,
        Family::Random => (Q::new(dd * dd + dd, 2) * pt.inv_q - Q::one()) / two_d,
        Family::AlphaRect { a, alpha, rho } => *rho * (pt.inv_p + kappa(a, *alpha)? * pt.inv_q - Q::one()),
    })
}

/// Float view of a rational.
pub fn f(r: Q) -> f64 {
    to_f64(r)
}
