//! Curves with exact derivative oracles, torsion, finite type and rescalings.

use crate::quadrature::gl32;
use crate::rational::{parse_rational, to_f64};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;

/// Default relative tolerance for determinant tests.
pub const DET_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum Repr {
    /// `coeffs[i][k]` is the coefficient of `t^k` in component `i`.
    Polynomial {
        coeffs: Vec<Vec<f64>>,
        exact: Option<Vec<Vec<Rational64>>>,
    },
    /// Component `i` is `exp(c_i t)`.
    Exponential(Vec<f64>),
    /// `map * (base(u t + t0) - base(t0))`.
    Affine {
        base: Box<Curve>,
        map: DMatrix<f64>,
        t0: f64,
        u: f64,
    },
}

/// A smooth curve `[t_lo, t_hi] -> R^d` with a derivative oracle.
#[derive(Clone, Debug)]
pub struct Curve {
    d: usize,
    lo: f64,
    hi: f64,
    max_order: usize,
    repr: Repr,
}

/// Strictly increasing positive integer tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeTuple(Vec<u32>);

impl TypeTuple {
    pub fn new(a: Vec<u32>) -> Result<Self> {
        if a.is_empty() || a[0] < 1 || a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(format!("type tuple must be strictly increasing and positive: {a:?}")));
        }
        Ok(TypeTuple(a))
    }

    /// The nondegenerate tuple `(1, ..., d)`.
    pub fn standard(d: usize) -> Self {
        TypeTuple((1..=d as u32).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn norm1(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl std::fmt::Display for TypeTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn falling(k: usize, j: usize) -> f64 {
    ((k - j + 1)..=k).map(|v| v as f64).product()
}

/// `d^j/dt^j` of the polynomial with coefficients `c` at `t`.
pub fn poly_derivative(c: &[f64], t: f64, j: usize) -> f64 {
    if j >= c.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in (j..c.len()).rev() {
        acc = acc * t + c[k] * falling(k, j);
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    falling(n, k) / factorial(k as u32)
}

/// Coefficients of `p(u t + t0)` in powers of `t`.
fn poly_affine_substitute(c: &[f64], t0: f64, u: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    for (k, ck) in c.iter().enumerate() {
        if *ck == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate().take(k + 1) {
            *o += ck * binomial(k, j) * t0.powi((k - j) as i32) * u.powi(j as i32);
        }
    }
    out
}

impl Curve {
    /// Polynomial curve; `coeffs[i][k]` multiplies `t^k` in component `i`.
    pub fn polynomial(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let d = coeffs.len();
        if d < 1 {
            return Err(Error::Argument("curve needs at least one component".into()));
        }
        if coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Argument("non-finite coefficient".into()));
        }
        Ok(Curve { d, lo: 0.0, hi: 1.0, max_order: (4 * d).max(8), repr: Repr::Polynomial { coeffs, exact: None } })
    }

    /// Polynomial curve from exact rational coefficients.
    pub fn polynomial_exact(exact: Vec<Vec<Rational64>>) -> Result<Self> {
        let coeffs = exact.iter().map(|r| r.iter().map(|c| to_f64(*c)).collect()).collect();
        let mut c = Curve::polynomial(coeffs)?;
        if let Repr::Polynomial { exact: e, .. } = &mut c.repr {
            *e = Some(exact);
        }
        Ok(c)
    }

    /// Moment curve `(t, t^2/2!, ..., t^d/d!)`.
    pub fn moment(d: usize) -> Self {
        let a: Vec<u32> = (1..=d as u32).collect();
        Curve::monomial(&a).expect("moment curve")
    }

    /// Monomial curve `(t^{a_1}/a_1!, ..., t^{a_d}/a_d!)`.
    pub fn monomial(a: &[u32]) -> Result<Self> {
        let exact = a
            .iter()
            .map(|&ai| {
                let mut row = vec![Rational64::from_integer(0); ai as usize + 1];
                let f: i64 = (1..=ai as i64).product();
                row[ai as usize] = Rational64::new(1, f);
                row
            })
            .collect();
        Curve::polynomial_exact(exact)
    }

    /// Component `i` equal to `exp(c_i t)`.
    pub fn exponential(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("exponential rates must be finite and non-empty".into()));
        }
        let d = c.len();
        Ok(Curve { d, lo: 0.0, hi: 1.0, max_order: (4 * d).max(8), repr: Repr::Exponential(c) })
    }

    /// Parse `moment(d)`, `poly([[..],[..]])`, `monomial(a1,..)` or `exponential(c1,..)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let (name, args) = s
            .split_once('(')
            .and_then(|(n, rest)| rest.strip_suffix(')').map(|a| (n, a)))
            .ok_or_else(|| Error::Config(format!("bad curve spec '{spec}'")))?;
        match name {
            "moment" => {
                let d: usize = args.parse().map_err(|_| Error::Config(format!("bad dimension in '{spec}'")))?;
                if d < 1 {
                    return Err(Error::Config("moment curve needs d >= 1".into()));
                }
                Ok(Curve::moment(d))
            }
            "monomial" => {
                let a = args
                    .split(',')
                    .map(|v| v.parse::<u32>().map_err(|_| Error::Config(format!("bad exponent '{v}'"))))
                    .collect::<Result<Vec<_>>>()?;
                TypeTuple::new(a.clone()).map_err(|e| Error::Config(e.to_string()))?;
                Curve::monomial(&a)
            }
            "exponential" => {
                let c = args
                    .split(',')
                    .map(|v| parse_rational(v).map(to_f64))
                    .collect::<Result<Vec<_>>>()?;
                Curve::exponential(c)
            }
            "poly" => {
                let inner = args
                    .strip_prefix('[')
                    .and_then(|a| a.strip_suffix(']'))
                    .ok_or_else(|| Error::Config(format!("bad coefficient table in '{spec}'")))?;
                let mut rows = Vec::new();
                for row in inner.split("],") {
                    let row = row.trim_start_matches('[').trim_end_matches(']');
                    let r = row.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
                    rows.push(r);
                }
                Curve::polynomial_exact(rows)
            }
            _ => Err(Error::Config(format!("unknown curve family '{name}'"))),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn max_derivative_order(&self) -> usize {
        self.max_order
    }

    /// Restrict or extend the parameter domain.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!("bad domain [{lo}, {hi}]")));
        }
        self.lo = lo;
        self.hi = hi;
        Ok(self)
    }

    pub fn with_max_order(mut self, order: usize) -> Result<Self> {
        if order < 2 * self.d {
            return Err(Error::Argument(format!("max derivative order must be at least 2d = {}", 2 * self.d)));
        }
        self.max_order = order;
        Ok(self)
    }

    /// Polynomial coefficient table, if any.
    pub fn coefficients(&self) -> Option<&[Vec<f64>]> {
        match &self.repr {
            Repr::Polynomial { coeffs, .. } => Some(coeffs),
            _ => None,
        }
    }

    /// Exact rational coefficients, if known.
    pub fn exact_coefficients(&self) -> Option<&[Vec<Rational64>]> {
        match &self.repr {
            Repr::Polynomial { exact: Some(e), .. } => Some(e),
            _ => None,
        }
    }

    fn in_domain(&self, t: f64) -> bool {
        let slack = 1e-9 * (self.hi - self.lo);
        t >= self.lo - slack && t <= self.hi + slack
    }

    /// `gamma^{(order)}(t)`.
    pub fn eval_derivative(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        if order > self.max_order {
            return Err(Error::Capability(format!(
                "derivative order {order} exceeds oracle capability {}",
                self.max_order
            )));
        }
        if !self.in_domain(t) {
            return Err(Error::Domain(format!("t = {t} outside [{}, {}]", self.lo, self.hi)));
        }
        let mut out = vec![0.0; self.d];
        self.derivative_into(t, order, &mut out);
        Ok(out)
    }

    /// Unchecked derivative evaluation for inner loops.
    pub fn derivative_into(&self, t: f64, order: usize, out: &mut [f64]) {
        match &self.repr {
            Repr::Polynomial { coeffs, .. } => {
                for (o, c) in out.iter_mut().zip(coeffs) {
                    *o = poly_derivative(c, t, order);
                }
            }
            Repr::Exponential(c) => {
                for (o, ci) in out.iter_mut().zip(c) {
                    *o = ci.powi(order as i32) * (ci * t).exp();
                }
            }
            Repr::Affine { base, map, t0, u } => {
                let mut v = vec![0.0; base.d];
                base.derivative_into(u * t + t0, order, &mut v);
                if order == 0 {
                    let mut b0 = vec![0.0; base.d];
                    base.derivative_into(*t0, 0, &mut b0);
                    for (vi, bi) in v.iter_mut().zip(&b0) {
                        *vi -= bi;
                    }
                } else {
                    let s = u.powi(order as i32);
                    for vi in v.iter_mut() {
                        *vi *= s;
                    }
                }
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..base.d).map(|j| map[(i, j)] * v[j]).sum();
                }
            }
        }
    }

    /// `gamma^{(order)}(t)` without checks.
    pub fn derivative(&self, t: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.derivative_into(t, order, &mut out);
        out
    }

    /// `gamma(t)` without domain checks.
    pub fn point(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.derivative_into(t, 0, &mut out);
        out
    }

    /// Columns `gamma^{(orders[j])}(t)`.
    pub fn derivative_matrix(&self, t: f64, orders: &[u32]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.d, orders.len());
        for (j, &o) in orders.iter().enumerate() {
            let col = self.eval_derivative(t, o as usize)?;
            m.set_column(j, &DVector::from_vec(col));
        }
        Ok(m)
    }

    /// `det(gamma'(t), ..., gamma^{(d)}(t))`.
    pub fn torsion_det(&self, t: f64) -> Result<f64> {
        let orders: Vec<u32> = (1..=self.d as u32).collect();
        Ok(self.derivative_matrix(t, &orders)?.determinant())
    }

    /// Minimal-norm tuple whose derivative columns are independent at `t`.
    pub fn detect_type(&self, t: f64, a_max: u32, det_tol: f64) -> Result<TypeTuple> {
        let d = self.d;
        if (a_max as usize) < d {
            return Err(Error::Argument(format!("a_max = {a_max} must be at least d = {d}")));
        }
        if det_tol <= 0.0 {
            return Err(Error::Argument("det_tol must be positive".into()));
        }
        let cols: Vec<Vec<f64>> = (1..=a_max as usize).map(|o| self.eval_derivative(t, o)).collect::<Result<_>>()?;
        let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        for a in increasing_tuples(d, a_max) {
            let mut m = DMatrix::zeros(d, d);
            for (j, &aj) in a.iter().enumerate() {
                m.set_column(j, &DVector::from_column_slice(&cols[aj as usize - 1]));
            }
            let prod: f64 = a.iter().map(|&aj| norms[aj as usize - 1]).product();
            let scale = if prod == 0.0 { 1.0 } else { prod };
            if m.determinant().abs() > det_tol * scale {
                return TypeTuple::new(a);
            }
        }
        Err(Error::NotFiniteType(a_max))
    }

    /// `(M D^u)^{-1} (gamma(u t + t0) - gamma(t0))` with `M` the type-`a` columns at `t0`.
    pub fn rescale(&self, t0: f64, u: f64, a: &TypeTuple) -> Result<Curve> {
        if a.d() != self.d {
            return Err(Error::Argument("type tuple length differs from curve dimension".into()));
        }
        if u == 0.0 || !self.in_domain(t0) || !self.in_domain(t0 + u) {
            return Err(Error::Domain(format!("[{t0}, {}] not inside the domain", t0 + u)));
        }
        let m = self.derivative_matrix(t0, a.as_slice())?;
        let norms: f64 = m.column_iter().map(|c| c.norm()).product();
        if m.determinant().abs() <= DET_TOL * if norms == 0.0 { 1.0 } else { norms } {
            return Err(Error::Singular(format!("derivative frame of type {a} is singular at t0 = {t0}")));
        }
        let mut md = m.clone();
        for (j, &aj) in a.as_slice().iter().enumerate() {
            md.column_mut(j).scale_mut(u.powi(aj as i32));
        }
        let inv = md
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("M D^u not invertible at t0 = {t0}")))?;
        let (lo, hi) = ((self.lo - t0) / u, (self.hi - t0) / u);
        let (lo, hi) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let out = match &self.repr {
            Repr::Polynomial { coeffs, .. } => {
                let shifted: Vec<Vec<f64>> = coeffs
                    .iter()
                    .map(|c| {
                        let mut s = poly_affine_substitute(c, t0, u);
                        s[0] = 0.0;
                        s
                    })
                    .collect();
                let deg = shifted.iter().map(Vec::len).max().unwrap_or(1);
                let mut out = vec![vec![0.0; deg]; self.d];
                for (i, row) in out.iter_mut().enumerate() {
                    for (j, s) in shifted.iter().enumerate() {
                        for (k, v) in s.iter().enumerate() {
                            row[k] += inv[(i, j)] * v;
                        }
                    }
                }
                Curve::polynomial(out)?
            }
            _ => Curve {
                d: self.d,
                lo,
                hi,
                max_order: self.max_order,
                repr: Repr::Affine { base: Box::new(self.clone()), map: inv, t0, u },
            },
        };
        Ok(Curve { lo, hi, max_order: self.max_order, ..out })
    }

    /// `D^a_{2^ell} gamma(2^{-ell} t)`, exact on polynomial coefficients.
    pub fn dyadic_rescale(&self, a: &TypeTuple, ell: u32) -> Result<Curve> {
        if a.d() != self.d {
            return Err(Error::Argument("type tuple length differs from curve dimension".into()));
        }
        let h = 2f64.powi(-(ell as i32));
        match &self.repr {
            Repr::Polynomial { coeffs, .. } => {
                let out = coeffs
                    .iter()
                    .zip(a.as_slice())
                    .map(|(c, &ai)| {
                        c.iter()
                            .enumerate()
                            .map(|(k, v)| v * 2f64.powi(ell as i32 * (ai as i32 - k as i32)))
                            .collect()
                    })
                    .collect();
                Ok(Curve { lo: self.lo, hi: self.hi, max_order: self.max_order, ..Curve::polynomial(out)? })
            }
            _ => {
                let diag: Vec<f64> = a.as_slice().iter().map(|&ai| 2f64.powi(ell as i32 * ai as i32)).collect();
                let map = DMatrix::from_diagonal(&DVector::from_vec(diag));
                // gamma(0) is subtracted by the affine form; normal-form curves vanish there anyway.
                Ok(Curve {
                    d: self.d,
                    lo: self.lo,
                    hi: self.hi,
                    max_order: self.max_order,
                    repr: Repr::Affine { base: Box::new(self.clone()), map, t0: 0.0, u: h },
                })
            }
        }
    }

    /// Membership in the class of curves `t^{a_i} phi_i(t)` with `phi_i` close to `1/a_i!`.
    ///
    /// Returns whether the measured `C^{a_d+1}` deviation is at most `eps`, and the deviation.
    pub fn class_membership(&self, a: &TypeTuple, eps: f64, grid_n: usize) -> Result<(bool, f64)> {
        if a.d() != self.d {
            return Err(Error::Argument("type tuple length differs from curve dimension".into()));
        }
        let grid_n = grid_n.max(2);
        let kmax = *a.as_slice().last().unwrap() as usize + 1;
        for (i, &ai) in a.as_slice().iter().enumerate() {
            for j in 0..ai as usize {
                let v = self.eval_derivative(0.0, j)?[i];
                if v.abs() > 1e-10 {
                    return Err(Error::NotNormalForm(format!("component {i} has nonzero derivative of order {j} at 0")));
                }
            }
        }
        let grid: Vec<f64> = (0..grid_n).map(|g| self.lo + (self.hi - self.lo) * g as f64 / (grid_n - 1) as f64).collect();
        let mut dev: f64 = 0.0;
        match &self.repr {
            Repr::Polynomial { coeffs, .. } => {
                for (i, (c, &ai)) in coeffs.iter().zip(a.as_slice()).enumerate() {
                    let ai = ai as usize;
                    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
                    if c.iter().take(ai).any(|v| v.abs() > 1e-12 * scale) {
                        return Err(Error::NotNormalForm(format!("component {i} not divisible by t^{ai}")));
                    }
                    let phi: Vec<f64> = c.iter().skip(ai).copied().collect();
                    let target = 1.0 / factorial(ai as u32);
                    for &t in &grid {
                        for k in 0..=kmax {
                            let v = poly_derivative(&phi, t, k) - if k == 0 { target } else { 0.0 };
                            dev = dev.max(v.abs());
                        }
                    }
                }
            }
            _ => {
                // phi^{(k)}(t) = 1/(a-1)! * int_0^1 (1-s)^{a-1} s^k gamma^{(a+k)}(s t) ds
                let rule = gl32();
                let mut buf = vec![0.0; self.d];
                for (i, &ai) in a.as_slice().iter().enumerate() {
                    let ai = ai as usize;
                    let target = 1.0 / factorial(ai as u32);
                    let norm = 1.0 / factorial(ai as u32 - 1);
                    if ai + kmax > self.max_order {
                        return Err(Error::Capability(format!(
                            "class test needs derivative order {} beyond capability {}",
                            ai + kmax,
                            self.max_order
                        )));
                    }
                    for &t in &grid {
                        for k in 0..=kmax {
                            let v = norm
                                * rule.integrate(0.0, 1.0, |s| {
                                    self.derivative_into(s * t, ai + k, &mut buf);
                                    (1.0 - s).powi(ai as i32 - 1) * s.powi(k as i32) * buf[i]
                                });
                            let v = v - if k == 0 { target } else { 0.0 };
                            dev = dev.max(v.abs());
                        }
                    }
                }
            }
        }
        Ok((dev <= eps, dev))
    }

    /// Scan of `max_t (|a(t)|_1 - a_1(t))` and `max_t |a(t)|_1` over the domain.
    ///
    /// Grid of `grid_n` points plus endpoints, refined by bisection on torsion sign
    /// changes and golden-section search on local minima of `|torsion|`.
    pub fn type_scan(&self, grid_n: usize, a_max: u32, det_tol: f64) -> Result<TypeScan> {
        let mut ts: Vec<f64> = (0..grid_n.max(2))
            .map(|g| self.lo + (self.hi - self.lo) * g as f64 / (grid_n.max(2) - 1) as f64)
            .collect();
        let tau: Vec<f64> = ts.iter().map(|&t| self.torsion_det(t)).collect::<Result<_>>()?;
        let mut extra = Vec::new();
        for w in 0..ts.len() - 1 {
            let (a, b) = (ts[w], ts[w + 1]);
            if tau[w] == 0.0 {
                continue;
            }
            if tau[w] * tau[w + 1] < 0.0 {
                extra.push(self.bisect_torsion(a, b, tau[w])?);
            }
        }
        for w in 1..ts.len() - 1 {
            if tau[w].abs() <= tau[w - 1].abs() && tau[w].abs() <= tau[w + 1].abs() {
                extra.push(self.golden_min_torsion(ts[w - 1], ts[w + 1])?);
            }
        }
        ts.extend(extra);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut best: Option<(f64, TypeTuple)> = None;
        let mut best_norm: Option<(f64, TypeTuple)> = None;
        for &t in &ts {
            let a = self.detect_type(t, a_max, det_tol)?;
            let k = a.norm1() - a.as_slice()[0];
            if best.as_ref().is_none_or(|(_, b)| k > b.norm1() - b.as_slice()[0]) {
                best = Some((t, a.clone()));
            }
            if best_norm.as_ref().is_none_or(|(_, b)| a.norm1() > b.norm1()) {
                best_norm = Some((t, a));
            }
        }
        let (t_kappa, a_kappa) = best.expect("non-empty scan");
        let (t_norm, a_norm) = best_norm.expect("non-empty scan");
        Ok(TypeScan { t_kappa, a_kappa, t_norm, a_norm, points: ts.len() })
    }

    fn bisect_torsion(&self, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
        let mut fa = fa;
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            let fm = self.torsion_det(m)?;
            if fm == 0.0 {
                return Ok(m);
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn golden_min_torsion(&self, mut a: f64, mut b: f64) -> Result<f64> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = self.torsion_det(c)?.abs();
        let mut fd = self.torsion_det(d)?.abs();
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.torsion_det(c)?.abs();
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.torsion_det(d)?.abs();
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// Result of a curve-wide finite-type scan.
#[derive(Clone, Debug)]
pub struct TypeScan {
    /// Maximiser of `|a(t)|_1 - a_1(t)`.
    pub t_kappa: f64,
    pub a_kappa: TypeTuple,
    /// Maximiser of `|a(t)|_1`.
    pub t_norm: f64,
    pub a_norm: TypeTuple,
    pub points: usize,
}

impl TypeScan {
    pub fn kappa_max(&self) -> u32 {
        self.a_kappa.norm1() - self.a_kappa.as_slice()[0]
    }

    pub fn norm_max(&self) -> u32 {
        self.a_norm.norm1()
    }
}

/// Strictly increasing `d`-tuples with entries in `1..=a_max`, ordered by sum then lexicographically.
pub fn increasing_tuples(d: usize, a_max: u32) -> Vec<Vec<u32>> {
    fn rec(start: u32, a_max: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=a_max {
            cur.push(v);
            rec(v + 1, a_max, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, a_max, d, &mut Vec::with_capacity(d), &mut out);
    out.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_basis_at_zero() {
        let c = Curve::moment(4);
        for j in 1..=4 {
            let v = c.eval_derivative(0.0, j).unwrap();
            for (i, vi) in v.iter().enumerate() {
                assert_eq!(*vi, if i + 1 == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn capability_error() {
        let c = Curve::moment(2).with_max_order(4).unwrap();
        assert!(matches!(c.eval_derivative(0.5, 5), Err(Error::Capability(_))));
        assert!(matches!(c.eval_derivative(2.0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_specs() {
        assert_eq!(Curve::parse("moment(3)").unwrap().d(), 3);
        let p = Curve::parse("poly([[0,1],[0,0,0.5]])").unwrap();
        assert_eq!(p.eval_derivative(1.0, 1).unwrap(), vec![1.0, 1.0]);
        assert_eq!(p.exact_coefficients().unwrap()[1][2], Rational64::new(1, 2));
        let m = Curve::parse("monomial(1, 3)").unwrap();
        assert!((m.point(1.0)[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!(Curve::parse("spiral(2)").is_err());
        assert!(Curve::parse("monomial(2,1)").is_err());
    }

    #[test]
    fn tuples_are_ordered() {
        let t = increasing_tuples(2, 4);
        assert_eq!(t[0], vec![1, 2]);
        assert_eq!(t[1], vec![1, 3]);
        assert_eq!(t[2], vec![1, 4]);
        assert_eq!(t[3], vec![2, 3]);
    }

    #[test]
    fn exponential_derivatives() {
        let c = Curve::exponential(vec![1.0, 2.0]).unwrap();
        let v = c.eval_derivative(0.5, 3).unwrap();
        assert!((v[1] - 8.0 * 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn analytic_rescale_round_trip() {
        let c = Curve::exponential(vec![1.0, 2.0, 3.0]).unwrap();
        let a = TypeTuple::standard(3);
        let (t0, u) = (0.2, 0.5);
        let r = c.rescale(t0, u, &a).unwrap();
        let m = c.derivative_matrix(t0, a.as_slice()).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let g = r.point(t);
            for i in 0..3 {
                let lhs: f64 = (0..3).map(|j| m[(i, j)] * u.powi(j as i32 + 1) * g[j]).sum();
                let rhs = c.point(u * t + t0)[i] - c.point(t0)[i];
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }
}
