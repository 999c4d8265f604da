//! Stationary map, curvature matrix, Knapp parallelepipeds and the extremal inputs.

use crate::curve::{Curve, TypeTuple, DET_TOL};
use crate::engine::{Modulation, PhaseKind, PhaseSpec, Segment, TestFunction};
use crate::measure::Submanifold;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Absolute residual target of the Newton stationary solve.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
/// Samples per axis of `P_k x I_k` used by the calibration.
pub const CALIBRATION_SAMPLES: usize = 33;
/// Smallest admissible calibrated constant.
pub const MIN_C: f64 = 1.0 / (1u64 << 20) as f64;

/// `{y : M^T (y - center) in prod [-w_i, w_i]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parallelepiped {
    pub center: Vec<f64>,
    pub transform: DMatrix<f64>,
    pub half_widths: Vec<f64>,
    pub volume: f64,
    /// `M^{-T}`, mapping rectangle coordinates to `y - center`.
    inv_t: DMatrix<f64>,
}

impl Parallelepiped {
    pub fn new(center: Vec<f64>, transform: DMatrix<f64>, half_widths: Vec<f64>) -> Result<Self> {
        let n = center.len();
        if transform.nrows() != n || transform.ncols() != n || half_widths.len() != n {
            return Err(Error::Argument("parallelepiped shape mismatch".into()));
        }
        if half_widths.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Argument("half-widths must be positive".into()));
        }
        let det = transform.determinant();
        let inv_t = transform
            .transpose()
            .try_inverse()
            .filter(|_| det != 0.0)
            .ok_or_else(|| Error::Singular("parallelepiped transform is singular".into()))?;
        let volume = half_widths.iter().map(|w| 2.0 * w).product::<f64>() / det.abs();
        Ok(Parallelepiped { center, transform, half_widths, volume, inv_t })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Rectangle coordinates `M^T (y - center)`.
    pub fn local(&self, y: &[f64]) -> Vec<f64> {
        let dy = DVector::from_iterator(y.len(), y.iter().zip(&self.center).map(|(a, b)| a - b));
        (self.transform.transpose() * dy).iter().copied().collect()
    }

    /// The point with rectangle coordinates `u`.
    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        let v = &self.inv_t * DVector::from_column_slice(u);
        v.iter().zip(&self.center).map(|(a, b)| a + b).collect()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        self.local(y).iter().zip(&self.half_widths).all(|(u, w)| u.abs() <= w * (1.0 + 1e-12))
    }

    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                let u: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { self.half_widths[i] } else { -self.half_widths[i] }).collect();
                self.point(&u)
            })
            .collect()
    }

    /// Lattice with `per_axis` points per rectangle axis, corners included.
    pub fn lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let m = per_axis.max(2);
        let total = m.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let u: Vec<f64> = idx
                .iter()
                .zip(&self.half_widths)
                .map(|(&j, w)| w * (-1.0 + 2.0 * j as f64 / (m - 1) as f64))
                .collect();
            out.push(self.point(&u));
            for j in idx.iter_mut() {
                *j += 1;
                if *j < m {
                    break;
                }
                *j = 0;
            }
        }
        out
    }
}

/// Ambient dimension of the phase.
pub fn ambient_dim(phase: &PhaseSpec) -> usize {
    match &phase.kind {
        PhaseKind::Submanifold(sm) => sm.d,
        PhaseKind::Custom(p) => p.n_y + 1,
        _ => phase.curve.as_ref().map_or(0, Curve::d),
    }
}

/// Newton iteration for `d_t grad_y Psi(y, t) = 0` from `seed`.
pub fn newton_stationary(phase: &PhaseSpec, t: f64, seed: &[f64]) -> Result<Vec<f64>> {
    let mut y = seed.to_vec();
    for _ in 0..NEWTON_MAX_ITER {
        let f = phase.dt_grad_y(&y, t, 1)?;
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= NEWTON_TOL {
            return Ok(y);
        }
        let jac = phase.mixed_hessian(&y, t)?;
        let step = jac
            .lu()
            .solve(&DVector::from_vec(f))
            .ok_or_else(|| Error::Stationary(format!("singular mixed Hessian at t = {t}")))?;
        for (yi, s) in y.iter_mut().zip(step.iter()) {
            *yi -= s;
        }
        if y.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    let f = phase.dt_grad_y(&y, t, 1)?;
    if f.iter().map(|v| v * v).sum::<f64>().sqrt() <= NEWTON_TOL {
        return Ok(y);
    }
    Err(Error::Stationary(format!("Newton did not converge at t = {t}")))
}

/// The stationary point `g(t)` with `d_t grad_y Psi(g(t), t) = 0`.
pub fn solve_stationary(phase: &PhaseSpec, t: f64) -> Result<Vec<f64>> {
    match &phase.kind {
        PhaseKind::Graph { .. } => {
            let c = phase.curve.as_ref().expect("graph phase carries a curve");
            let d1 = c.eval_derivative(t, 1)?;
            if d1[0].abs() < DET_TOL {
                return Err(Error::Stationary(format!("gamma_1'({t}) = 0")));
            }
            let v: Vec<f64> = d1[1..].iter().map(|x| -x / d1[0]).collect();
            let s = (1.0 + v.iter().map(|x| x * x).sum::<f64>()).sqrt();
            Ok(v.iter().map(|x| x / s).collect())
        }
        PhaseKind::Submanifold(sm) => Ok(sm.g(t)),
        PhaseKind::Extension => Err(Error::Stationary("the extension phase has no stationary map".into())),
        _ => newton_stationary(phase, t, &vec![0.0; phase.y_dim()]),
    }
}

/// `M(t)` with columns `d_t^{j+1} grad_y Psi(g(t), t)` (or `d_t^{l+j}` on a k-dimensional graph).
pub fn curvature_matrix(phase: &PhaseSpec, t: f64) -> Result<DMatrix<f64>> {
    let m = match &phase.kind {
        PhaseKind::Graph { .. } => {
            let c = phase.curve.as_ref().expect("graph phase carries a curve");
            let n = c.d() - 1;
            let d1 = c.eval_derivative(t, 1)?;
            if d1[0].abs() < DET_TOL {
                return Err(Error::Stationary(format!("gamma_1'({t}) = 0")));
            }
            let mut m = DMatrix::zeros(n, n);
            for j in 1..=n {
                let dj = c.eval_derivative(t, j + 1)?;
                for i in 0..n {
                    m[(i, j - 1)] = -(dj[0] / d1[0]) * d1[i + 1] + dj[i + 1];
                }
            }
            m
        }
        PhaseKind::Submanifold(sm) => sm.curvature(t)?,
        _ => {
            let y = solve_stationary(phase, t)?;
            let n = y.len();
            let mut m = DMatrix::zeros(n, n);
            for j in 1..=n {
                let col = phase.dt_grad_y(&y, t, j + 1)?;
                m.set_column(j - 1, &DVector::from_vec(col));
            }
            m
        }
    };
    if m.determinant().abs() < DET_TOL {
        return Err(Error::Degenerate(format!("|det M({t})| below {DET_TOL:e}")));
    }
    Ok(m)
}

/// `rho = 1/(2d)`.
pub fn default_rho(d: usize) -> f64 {
    1.0 / (2.0 * d as f64)
}

/// Half-widths `c lambda^{-1 + i rho}` for axes `i = first..first+n-1`.
fn widths(c: f64, lambda: f64, rho: f64, first: usize, n: usize) -> Vec<f64> {
    (0..n).map(|j| c * lambda.powf(-1.0 + (first + j) as f64 * rho)).collect()
}

/// `P_k = {y : M^T(t_k)(y - g(t_k)) in R}` with `R = {|x_i| <= c lambda^{-1 + i rho}, 2 <= i <= d}`.
pub fn knapp_box(phase: &PhaseSpec, t_k: f64, lambda: f64, c: f64) -> Result<Parallelepiped> {
    if !(c > 0.0) || !(lambda > 0.0) {
        return Err(Error::Argument("c and lambda must be positive".into()));
    }
    let d = ambient_dim(phase);
    let center = solve_stationary(phase, t_k)?;
    let m = curvature_matrix(phase, t_k)?;
    let n = center.len();
    let first = d - n + 1;
    Parallelepiped::new(center, m, widths(c, lambda, default_rho(d), first, n))
}

/// `Psi(y, t) - Psi(y_k, t) - Psi(y, t_k) + Psi(y_k, t_k)`: the phase left after removing
/// factors depending on `t` alone or `y` alone.
pub fn reduced_phase(phase: &PhaseSpec, y_k: &[f64], t_k: f64, y: &[f64], t: f64) -> Result<f64> {
    Ok(phase.psi(y, t)? - phase.psi(y_k, t)? - phase.psi(y, t_k)? + phase.psi(y_k, t_k)?)
}

/// Per-axis lattice size giving about `CALIBRATION_SAMPLES` points in `n` dimensions.
pub fn lattice_per_axis(n: usize) -> usize {
    ((CALIBRATION_SAMPLES as f64).powf(1.0 / n.max(1) as f64).ceil() as usize).max(3)
}

/// Sampled `max |reduced phase|` over `P x [s, e]`.
pub fn sampled_phase_max(phase: &PhaseSpec, bx: &Parallelepiped, t_k: f64, interval: (f64, f64)) -> Result<f64> {
    let ys = bx.lattice(lattice_per_axis(bx.dim()));
    let n_t = CALIBRATION_SAMPLES;
    let mut best: f64 = 0.0;
    for y in &ys {
        for j in 0..n_t {
            let t = interval.0 + (interval.1 - interval.0) * j as f64 / (n_t - 1) as f64;
            best = best.max(reduced_phase(phase, &bx.center, t_k, y, t)?.abs());
        }
    }
    Ok(best)
}

/// Largest `c` in `{1, 1/2, 1/4, ...}` with `check(c) <= bound`.
pub fn dyadic_calibrate(bound: f64, mut check: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut c = 1.0;
    while c >= MIN_C {
        if check(c)? <= bound {
            return Ok(c);
        }
        c *= 0.5;
    }
    Err(Error::Calibration(format!("no admissible c >= 2^-20 for bound {bound:.3e}")))
}

/// Largest dyadic `c` such that the sampled reduced phase stays below `1/lambda` on `P_k x I_k`.
///
/// A box that leaves the chart domain counts as too large.
pub fn calibrate_c(phase: &PhaseSpec, t_k: f64, lambda: f64, interval: (f64, f64)) -> Result<f64> {
    dyadic_calibrate(1.0 / lambda, |c| match sampled_phase_max(phase, &knapp_box(phase, t_k, lambda, c)?, t_k, interval) {
        Err(Error::Domain(_)) => Ok(f64::INFINITY),
        r => r,
    })
}

/// Uniform partition of `[0, delta]` into `l ~ delta lambda^{1/(2d)}` intervals.
#[derive(Clone, Debug)]
pub struct PartitionFamily {
    pub delta: f64,
    pub ell: usize,
    /// `I_k = [t_{k-1}, t_k]`.
    pub intervals: Vec<(f64, f64)>,
    /// Right endpoints `t_k`.
    pub t: Vec<f64>,
    /// `y_k = g(t_k)`.
    pub y: Vec<Vec<f64>>,
    pub m: Vec<DMatrix<f64>>,
}

pub fn partition_family(phase: &PhaseSpec, delta: f64, lambda: f64) -> Result<PartitionFamily> {
    let d = ambient_dim(phase);
    let rho = default_rho(d);
    let len = lambda.powf(-rho);
    if !(len <= delta) {
        return Err(Error::Argument(format!("lambda^(-1/(2d)) = {len:.4} must not exceed delta = {delta}")));
    }
    let ell = ((delta / len).round() as usize).max(1);
    let h = delta / ell as f64;
    let mut out = PartitionFamily { delta, ell, intervals: Vec::new(), t: Vec::new(), y: Vec::new(), m: Vec::new() };
    for k in 0..ell {
        let (s, e) = (k as f64 * h, if k + 1 == ell { delta } else { (k + 1) as f64 * h });
        let tag = |err: Error| Error::Stationary(format!("interval {}: {err}", k + 1));
        out.intervals.push((s, e));
        out.t.push(e);
        out.y.push(solve_stationary(phase, e).map_err(tag)?);
        out.m.push(curvature_matrix(phase, e).map_err(tag)?);
    }
    Ok(out)
}

/// `chi_{[t0, t0 + lambda^{-rho}]}`.
pub fn knapp_input(t0: f64, lambda: f64, rho: f64) -> Result<TestFunction> {
    TestFunction::indicator(t0, t0 + lambda.powf(-rho))
}

/// `chi_{[0, eps0]}(t) exp(-i lambda x0 . gamma(t))`.
pub fn bump_input(curve: &Curve, lambda: f64, x0: &[f64], eps0: f64) -> Result<TestFunction> {
    if x0.len() != curve.d() {
        return Err(Error::Argument("x0 has the wrong dimension".into()));
    }
    let mut s = Segment::indicator(0.0, eps0);
    s.modulation = Some(Modulation { x0: x0.to_vec(), lambda });
    TestFunction::new(vec![s])
}

/// Rademacher signs drawn sequentially from `seed`.
pub fn rademacher(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// `sum eps_k chi_{I_k}` with signs from `seed`.
pub fn random_sign_input(partition: &PartitionFamily, seed: u64) -> Result<TestFunction> {
    let signs = rademacher(partition.ell, seed);
    TestFunction::new(
        partition
            .intervals
            .iter()
            .zip(signs)
            .map(|(&(s, e), sign)| Segment { sign, ..Segment::indicator(s, e) })
            .collect(),
    )
}

/// `chi_{[s, e]}(t) exp(-i lambda Psi(y_k, t))`, so that `|T f(y)|` sees only the reduced phase.
pub fn centred_indicator(phase: &PhaseSpec, y_k: &[f64], interval: (f64, f64), lambda: f64, sign: f64) -> Result<Segment> {
    let (w, shift, _) = phase
        .linear_form(y_k)?
        .filter(|(_, shift, _)| *shift == 0.0)
        .ok_or_else(|| Error::Argument("centring needs an unshifted curve phase".into()))?;
    debug_assert_eq!(shift, 0.0);
    Ok(Segment {
        s: interval.0,
        e: interval.1,
        amp: Complex64::new(1.0, 0.0),
        modulation: Some(Modulation { x0: w, lambda }),
        sign,
    })
}

/// `sum eps_k chi_{I_k} exp(-i lambda Psi(y_k, t))` with signs from `seed`.
pub fn centred_random_input(phase: &PhaseSpec, partition: &PartitionFamily, lambda: f64, seed: u64) -> Result<TestFunction> {
    let signs = rademacher(partition.ell, seed);
    let segs = partition
        .intervals
        .iter()
        .zip(&partition.y)
        .zip(signs)
        .map(|((iv, y), s)| centred_indicator(phase, y, *iv, lambda, s))
        .collect::<Result<Vec<_>>>()?;
    TestFunction::new(segs)
}

/// Frame, rectangle and phase of the finite-type necessity construction over the sphere.
#[derive(Clone, Debug)]
pub struct NecessityRect {
    pub a: TypeTuple,
    /// Columns `v_1, ..., v_d`.
    pub frame: DMatrix<f64>,
    /// `R_a` in the chart coordinates over `-v_d`.
    pub rect: Parallelepiped,
    /// `Phi(y, t)` on the chart.
    pub phase: PhaseSpec,
}

/// Orthonormal frame with `v_i` orthogonal to `gamma^{(a_1)}, ..., gamma^{(a_{d-i})}` at `t0`.
pub fn necessity_frame(curve: &Curve, t0: f64, a: &TypeTuple) -> Result<DMatrix<f64>> {
    let d = curve.d();
    let u = curve.derivative_matrix(t0, a.as_slice())?;
    // modified Gram-Schmidt on the nested spans; e_m spans the new direction of span{u_1..u_m}
    let mut e: Vec<DVector<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = u.column(j).into_owned();
        let scale = v.norm();
        for _ in 0..2 {
            for b in &e {
                let p = b.dot(&v);
                v -= b * p;
            }
        }
        let n = v.norm();
        if !(n > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::Frame(format!("derivative spans are rank deficient at t0 = {t0}")));
        }
        e.push(v / n);
    }
    let mut frame = DMatrix::zeros(d, d);
    for i in 0..d - 1 {
        frame.set_column(i, &e[d - 1 - i]);
    }
    frame.set_column(d - 1, &e[0]);
    Ok(frame)
}

/// `R_a = {|y_i| <= c lambda^{-1 + rho a_{d+1-i}}}` with the frame and phase built at `t0`.
pub fn necessity_rect_sphere(curve: &Curve, t0: f64, lambda: f64, rho: f64, c: f64) -> Result<NecessityRect> {
    let d = curve.d();
    let a = curve.detect_type(t0, (4 * d) as u32, DET_TOL)?;
    let s = a.as_slice();
    let limit = 1.0 / (2.0 * s[d - 1] as f64 - s[0] as f64);
    if !(rho > 0.0 && rho < limit) {
        return Err(Error::Argument(format!("rho = {rho} outside (0, {limit})")));
    }
    if !(c > 0.0) {
        return Err(Error::Argument("c must be positive".into()));
    }
    let frame = necessity_frame(curve, t0, &a)?;
    let hw: Vec<f64> = (1..d).map(|i| c * lambda.powf(-1.0 + rho * s[d - i] as f64)).collect();
    let rect = Parallelepiped::new(vec![0.0; d - 1], DMatrix::identity(d - 1, d - 1), hw)?;
    let phase = PhaseSpec::frame(curve.clone(), frame.clone(), t0)?;
    Ok(NecessityRect { a, frame, rect, phase })
}

/// Sampled `max |Phi(y, t) - Phi(0, t)|` over `R_a x [0, lambda^{-rho}]`.
pub fn necessity_phase_max(nr: &NecessityRect, lambda: f64, rho: f64) -> Result<f64> {
    sampled_phase_max(&nr.phase, &nr.rect, 0.0, (0.0, lambda.powf(-rho)))
}

/// Boxes `{y : M^T(t_m)(y - g(t_m)) in R}` with `R = {|x_i| <= c lambda^{-1 + i rho}, d-k+1 <= i <= d}`
/// on the `lambda^{-1/(2d)}` partition of `[0, delta]`.
pub fn kdim_boxes(sm: &Submanifold, lambda: f64, c: f64, delta: f64) -> Result<Vec<((f64, f64), Parallelepiped)>> {
    let phase = PhaseSpec::submanifold(std::sync::Arc::new(sm.clone()));
    let part = partition_family(&phase, delta, lambda)?;
    let rho = default_rho(sm.d);
    part.intervals
        .iter()
        .zip(&part.t)
        .zip(&part.m)
        .map(|((iv, &t), m)| Ok((*iv, Parallelepiped::new(sm.g(t), m.clone(), widths(c, lambda, rho, sm.l + 1, sm.k))?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_stationary_closed_form() {
        let ph = PhaseSpec::graph(Curve::moment(2), true);
        assert_eq!(solve_stationary(&ph, 0.0).unwrap(), vec![0.0]);
        let g = solve_stationary(&ph, 0.5).unwrap();
        assert!((g[0] + 1.0 / 5f64.sqrt()).abs() < 1e-15);
        let n = newton_stationary(&ph, 0.5, &[0.0]).unwrap();
        assert!((n[0] - g[0]).abs() < 1e-12);
    }

    #[test]
    fn circle_curvature_at_zero() {
        let ph = PhaseSpec::graph(Curve::moment(2), true);
        assert_eq!(curvature_matrix(&ph, 0.0).unwrap(), DMatrix::identity(1, 1));
    }

    #[test]
    fn partition_counts() {
        let ph = PhaseSpec::graph(Curve::moment(2), true);
        assert_eq!(partition_family(&ph, 0.25, 256.0).unwrap().ell, 1);
        assert_eq!(partition_family(&ph, 0.25, 4096.0).unwrap().ell, 2);
    }

    #[test]
    fn box_corners_map_to_rectangle() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, -0.1, 1.0]);
        let bx = Parallelepiped::new(vec![0.1, 0.2], m, vec![0.01, 0.02]).unwrap();
        assert!(bx.contains(&bx.center));
        for c in bx.corners() {
            let u = bx.local(&c);
            assert!((u[0].abs() - 0.01).abs() < 1e-12 && (u[1].abs() - 0.02).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let c = Curve::polynomial(vec![vec![0.0, 1.0], vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.0, 0.0, 1.0 / 24.0]]).unwrap();
        let a = TypeTuple::new(vec![1, 2, 4]).unwrap();
        let v = necessity_frame(&c, 0.0, &a).unwrap();
        assert!((v.transpose() * &v - DMatrix::identity(3, 3)).norm() < 1e-12);
    }
}
