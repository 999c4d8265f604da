use super::TestFunction;
use crate::curve::Curve;
use crate::measure::{SphereCap, Submanifold};
use crate::{Error, Result};
use nalgebra::DMatrix;
use std::sync::Arc;

/// `C^inf` cutoff equal to 1 on `|u| <= 1` and vanishing for `|u| >= 2`.
pub fn cutoff(u: f64) -> f64 {
    let x = 2.0 - u.abs();
    if x >= 1.0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = f(x);
    a / (a + f(1.0 - x))
}

/// Product bump `a(y, t)`; a missing window means the factor is identically 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Amplitude {
    /// `(center, radius)` per y-axis: 1 within the radius, 0 beyond twice it.
    pub y_window: Option<(Vec<f64>, Vec<f64>)>,
    pub t_window: Option<(f64, f64)>,
}

impl Amplitude {
    pub fn one() -> Self {
        Amplitude::default()
    }

    pub fn window(center: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if center.len() != radii.len() || radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Argument("amplitude window needs one positive radius per axis".into()));
        }
        Ok(Amplitude { y_window: Some((center, radii)), t_window: None })
    }

    pub fn with_t_window(mut self, center: f64, radius: f64) -> Self {
        self.t_window = Some((center, radius));
        self
    }

    pub fn y_factor(&self, y: &[f64]) -> f64 {
        match &self.y_window {
            None => 1.0,
            Some((c, r)) => y.iter().zip(c).zip(r).map(|((y, c), r)| cutoff((y - c) / r)).product(),
        }
    }

    pub fn t_factor(&self, t: f64) -> f64 {
        match self.t_window {
            None => 1.0,
            Some((c, r)) => cutoff((t - c) / r),
        }
    }
}

/// Polynomial phase `sum c y^m t^n` in `(y, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomPoly {
    pub n_y: usize,
    /// `(y exponents, t exponent, coefficient)`.
    pub terms: Vec<(Vec<u32>, u32, f64)>,
}

fn falling(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).map(|v| v as f64).product()
}

impl CustomPoly {
    pub fn new(n_y: usize, terms: Vec<(Vec<u32>, u32, f64)>) -> Result<Self> {
        if terms.iter().any(|(m, _, c)| m.len() != n_y || !c.is_finite()) {
            return Err(Error::Argument("custom phase term has the wrong arity".into()));
        }
        Ok(CustomPoly { n_y, terms })
    }

    /// `d_y^dy d_t^jt` at `(y, t)` where `dy[i]` counts derivatives in `y_i`.
    pub fn derivative(&self, y: &[f64], t: f64, dy: &[u32], jt: u32) -> f64 {
        let mut s = 0.0;
        for (m, n, c) in &self.terms {
            if *n < jt || m.iter().zip(dy).any(|(a, b)| a < b) {
                continue;
            }
            let mut v = c * falling(*n, jt) * t.powi((*n - jt) as i32);
            for ((a, b), yi) in m.iter().zip(dy).zip(y) {
                v *= falling(*a, *b) * yi.powi((a - b) as i32);
            }
            s += v;
        }
        s
    }

    pub fn eval(&self, y: &[f64], t: f64, jt: u32) -> f64 {
        self.derivative(y, t, &vec![0; self.n_y], jt)
    }
}

#[derive(Clone, Debug)]
pub enum PhaseKind {
    /// `x . gamma(t)`; the evaluation point is the ambient point.
    Extension,
    /// `(phi(y) - 1, y) . gamma(t)` over the sphere near `-e_1`, or `(phi(y), y) . gamma(t)` without the offset.
    Graph { keep_offset: bool },
    /// `(sum y_i v_i + (phi(y) - 1) v_d) . (gamma(t + t0) - gamma(t0))` with frame columns `v_1..v_d`.
    Frame { v: DMatrix<f64>, t0: f64 },
    /// `(phi(y), y) . gamma(t)` on the graph built by the submanifold builder.
    Submanifold(Arc<Submanifold>),
    Custom(CustomPoly),
}

/// A phase `Psi(y, t)` with its amplitude window.
#[derive(Clone, Debug)]
pub struct PhaseSpec {
    pub kind: PhaseKind,
    pub curve: Option<Curve>,
    pub amplitude: Amplitude,
}

impl PhaseSpec {
    pub fn extension(curve: Curve) -> Self {
        PhaseSpec { kind: PhaseKind::Extension, curve: Some(curve), amplitude: Amplitude::one() }
    }

    pub fn graph(curve: Curve, keep_offset: bool) -> Self {
        PhaseSpec { kind: PhaseKind::Graph { keep_offset }, curve: Some(curve), amplitude: Amplitude::one() }
    }

    pub fn frame(curve: Curve, v: DMatrix<f64>, t0: f64) -> Result<Self> {
        let d = curve.d();
        if v.nrows() != d || v.ncols() != d {
            return Err(Error::Argument("frame must be d x d".into()));
        }
        Ok(PhaseSpec { kind: PhaseKind::Frame { v, t0 }, curve: Some(curve), amplitude: Amplitude::one() })
    }

    pub fn submanifold(sm: Arc<Submanifold>) -> Self {
        let curve = sm.curve.clone();
        PhaseSpec { kind: PhaseKind::Submanifold(sm), curve: Some(curve), amplitude: Amplitude::one() }
    }

    pub fn custom(poly: CustomPoly) -> Self {
        PhaseSpec { kind: PhaseKind::Custom(poly), curve: None, amplitude: Amplitude::one() }
    }

    pub fn with_amplitude(mut self, a: Amplitude) -> Self {
        self.amplitude = a;
        self
    }

    fn curve(&self) -> &Curve {
        self.curve.as_ref().expect("curve-based phase")
    }

    /// Dimension of the `y` variable.
    pub fn y_dim(&self) -> usize {
        match &self.kind {
            PhaseKind::Extension => self.curve().d(),
            PhaseKind::Graph { .. } | PhaseKind::Frame { .. } => self.curve().d() - 1,
            PhaseKind::Submanifold(sm) => sm.k,
            PhaseKind::Custom(p) => p.n_y,
        }
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.y_dim() {
            return Err(Error::Argument(format!("phase point has length {} (expected {})", y.len(), self.y_dim())));
        }
        Ok(())
    }

    /// `(w, shift, c)` with `Psi(y, t) = w . gamma(t + shift) + c`; `None` for custom phases.
    pub fn linear_form(&self, y: &[f64]) -> Result<Option<(Vec<f64>, f64, f64)>> {
        self.check_dim(y)?;
        Ok(Some(match &self.kind {
            PhaseKind::Extension => (y.to_vec(), 0.0, 0.0),
            PhaseKind::Graph { keep_offset } => {
                let phi = SphereCap { n: y.len() }.value(y)?;
                let mut w = Vec::with_capacity(y.len() + 1);
                w.push(if *keep_offset { phi - 1.0 } else { phi });
                w.extend_from_slice(y);
                (w, 0.0, 0.0)
            }
            PhaseKind::Frame { v, t0 } => {
                let w = self.frame_point(v, y)?;
                let g0 = self.curve().point(*t0);
                let c = -w.iter().zip(&g0).map(|(a, b)| a * b).sum::<f64>();
                (w, *t0, c)
            }
            PhaseKind::Submanifold(sm) => {
                let mut w = sm.phi(y)?;
                w.extend_from_slice(y);
                (w, 0.0, 0.0)
            }
            PhaseKind::Custom(_) => return Ok(None),
        }))
    }

    fn frame_point(&self, v: &DMatrix<f64>, y: &[f64]) -> Result<Vec<f64>> {
        let n = y.len();
        let phi = SphereCap { n }.value(y)?;
        Ok((0..n + 1)
            .map(|r| (0..n).map(|i| y[i] * v[(r, i)]).sum::<f64>() + (phi - 1.0) * v[(r, n)])
            .collect())
    }

    /// `d_t^j Psi(y, t)`.
    pub fn psi_dt(&self, y: &[f64], t: f64, j: usize) -> Result<f64> {
        match self.linear_form(y)? {
            Some((w, shift, c)) => {
                let g = self.curve().derivative(t + shift, j);
                Ok(w.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() + if j == 0 { c } else { 0.0 })
            }
            None => {
                let PhaseKind::Custom(p) = &self.kind else { unreachable!() };
                Ok(p.eval(y, t, j as u32))
            }
        }
    }

    pub fn psi(&self, y: &[f64], t: f64) -> Result<f64> {
        self.psi_dt(y, t, 0)
    }

    /// `d_t^j grad_y Psi(y, t)`.
    pub fn dt_grad_y(&self, y: &[f64], t: f64, j: usize) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        match &self.kind {
            PhaseKind::Extension => Ok(self.curve().derivative(t, j)),
            PhaseKind::Graph { .. } => {
                let grad = SphereCap { n: y.len() }.gradient(y)?;
                let g = self.curve().derivative(t, j);
                Ok((0..y.len()).map(|i| grad[i] * g[0] + g[i + 1]).collect())
            }
            PhaseKind::Frame { v, t0 } => {
                let n = y.len();
                let grad = SphereCap { n }.gradient(y)?;
                let mut g = self.curve().derivative(t + t0, j);
                if j == 0 {
                    let g0 = self.curve().point(*t0);
                    g.iter_mut().zip(&g0).for_each(|(a, b)| *a -= b);
                }
                let vd: f64 = (0..=n).map(|r| v[(r, n)] * g[r]).sum();
                Ok((0..n).map(|i| (0..=n).map(|r| v[(r, i)] * g[r]).sum::<f64>() + grad[i] * vd).collect())
            }
            PhaseKind::Submanifold(sm) => sm.dt_grad_psi(y, t, j),
            PhaseKind::Custom(p) => Ok((0..p.n_y)
                .map(|i| {
                    let mut dy = vec![0; p.n_y];
                    dy[i] = 1;
                    p.derivative(y, t, &dy, j as u32)
                })
                .collect()),
        }
    }

    /// `grad_y d_t grad_y Psi(y, t)`.
    pub fn mixed_hessian(&self, y: &[f64], t: f64) -> Result<DMatrix<f64>> {
        self.check_dim(y)?;
        let n = y.len();
        match &self.kind {
            PhaseKind::Extension => Ok(DMatrix::zeros(n, n)),
            PhaseKind::Graph { .. } => {
                let h = SphereCap { n }.hessian(y)?;
                Ok(h * self.curve().derivative(t, 1)[0])
            }
            PhaseKind::Frame { v, t0 } => {
                let h = SphereCap { n }.hessian(y)?;
                let g = self.curve().derivative(t + t0, 1);
                let vd: f64 = (0..=n).map(|r| v[(r, n)] * g[r]).sum();
                Ok(h * vd)
            }
            PhaseKind::Custom(p) => Ok(DMatrix::from_fn(n, n, |i, k| {
                let mut dy = vec![0; n];
                dy[i] += 1;
                dy[k] += 1;
                p.derivative(y, t, &dy, 1)
            })),
            PhaseKind::Submanifold(_) => {
                let h = 1e-5;
                let mut m = DMatrix::zeros(n, n);
                for k in 0..n {
                    let mut yp = y.to_vec();
                    let mut ym = y.to_vec();
                    yp[k] += h;
                    ym[k] -= h;
                    let a = self.dt_grad_y(&yp, t, 1)?;
                    let b = self.dt_grad_y(&ym, t, 1)?;
                    for i in 0..n {
                        m[(i, k)] = (a[i] - b[i]) / (2.0 * h);
                    }
                }
                Ok(m)
            }
        }
    }

    /// Bandwidth of `y -> T f(y)` used by the spacing rule.
    pub fn lambda_eff(&self, lambda: f64, f: &TestFunction) -> f64 {
        match &self.kind {
            PhaseKind::Custom(p) => {
                let Some((lo, hi)) = f.hull() else { return 0.0 };
                let y0 = vec![0.0; p.n_y];
                let grad = |t: f64| self.dt_grad_y(&y0, t, 0).unwrap_or_default();
                let gc = grad(0.5 * (lo + hi));
                let mut r: f64 = 0.0;
                for k in 0..=64 {
                    let g = grad(lo + (hi - lo) * k as f64 / 64.0);
                    r = r.max(g.iter().zip(&gc).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
                }
                lambda * r
            }
            _ => super::lambda_eff(self.curve(), lambda, f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        let v = cutoff(1.5);
        assert!(v > 0.0 && v < 1.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn custom_derivatives() {
        // y^2 t^3
        let p = CustomPoly::new(1, vec![(vec![2], 3, 1.0)]).unwrap();
        assert_eq!(p.derivative(&[2.0], 3.0, &[1], 1), 4.0 * 27.0);
        assert_eq!(p.derivative(&[2.0], 3.0, &[3], 0), 0.0);
    }

    #[test]
    fn graph_matches_sphere_point() {
        let c = Curve::moment(3);
        let ph = PhaseSpec::graph(c.clone(), true);
        let y = [0.2, -0.1];
        let x = SphereCap { n: 2 }.embed(&y).unwrap();
        let p = c.point(0.4);
        let direct: f64 = x.iter().zip(&p).map(|(a, b)| a * b).sum();
        assert!((ph.psi(&y, 0.4).unwrap() - direct).abs() < 1e-15);
    }
}
