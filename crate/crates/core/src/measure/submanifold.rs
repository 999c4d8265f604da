use super::{Provenance, QuadMeasure};
use crate::curve::Curve;
use crate::quadrature::{gauss_legendre, gl32};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// A k-dimensional graph `x = (phi_1(y), ..., phi_l(y), y)` adapted to a curve.
///
/// The graph functions are `phi_j(y) = sum_i int_0^{y_i} E_ij(s) ds` with
/// `E = -B_1 A_1^{-1}`, so that `d_t^j grad_y psi(g(t), t) = 0` for `j <= l`
/// along `g(t) = (t, ..., t)`, where `psi(y, t) = (phi(y), y) . gamma(t)`.
#[derive(Clone, Debug)]
pub struct Submanifold {
    pub d: usize,
    pub k: usize,
    pub l: usize,
    /// `perm[j]` is the ambient coordinate of the j-th graph slot.
    pub perm: Vec<usize>,
    /// The curve with components reordered by `perm`.
    pub curve: Curve,
    pub extent: f64,
}

fn permute_curve(curve: &Curve, perm: &[usize]) -> Result<Curve> {
    let coeffs = curve
        .coefficients()
        .ok_or_else(|| Error::Construction("submanifold builder needs a polynomial curve".into()))?;
    let rows = perm.iter().map(|&p| coeffs[p].clone()).collect();
    let (lo, hi) = curve.domain();
    Curve::polynomial(rows)?.with_domain(lo, hi)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl Submanifold {
    fn deriv(&self, t: f64, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        self.curve.derivative_into(t, j, &mut v);
        v
    }

    /// Blocks `(A_1, A_2, B_1, B_2)` at `t`.
    pub fn blocks(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let (l, k, d) = (self.l, self.k, self.d);
        let cols: Vec<Vec<f64>> = (1..=d).map(|j| self.deriv(t, j)).collect();
        let a1 = DMatrix::from_fn(l, l, |i, j| cols[j][i]);
        let a2 = DMatrix::from_fn(l, k, |i, j| cols[l + j][i]);
        let b1 = DMatrix::from_fn(k, l, |i, j| cols[j][l + i]);
        let b2 = DMatrix::from_fn(k, k, |i, j| cols[l + j][l + i]);
        (a1, a2, b1, b2)
    }

    /// `E(s) = -B_1(s) A_1(s)^{-1}` (k x l).
    pub fn e_matrix(&self, s: f64) -> Result<DMatrix<f64>> {
        let (a1, _, b1, _) = self.blocks(s);
        let inv = a1
            .try_inverse()
            .ok_or_else(|| Error::Construction(format!("A_1 singular at t = {s}")))?;
        Ok(-(b1 * inv))
    }

    /// `g(t) = (t, ..., t)`.
    pub fn g(&self, t: f64) -> Vec<f64> {
        vec![t; self.k]
    }

    /// Graph values `phi_j(y)` by 32-point Gauss–Legendre on each `[0, y_i]`.
    pub fn phi(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.l];
        let rule = gl32();
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (s, w) in rule.mapped(0.0, yi) {
                let e = self.e_matrix(s)?;
                for (j, o) in out.iter_mut().enumerate() {
                    *o += w * e[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// `grad phi(y)` as a k x l matrix (column j is `grad phi_j`).
    pub fn grad_phi(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let mut g = DMatrix::zeros(self.k, self.l);
        for (i, &yi) in y.iter().enumerate() {
            let e = self.e_matrix(yi)?;
            for j in 0..self.l {
                g[(i, j)] = e[(i, j)];
            }
        }
        Ok(g)
    }

    /// Ambient point of the graph over `y`, in original coordinates.
    pub fn embed(&self, y: &[f64]) -> Result<Vec<f64>> {
        let phi = self.phi(y)?;
        let mut x = vec![0.0; self.d];
        for (slot, v) in phi.iter().chain(y.iter()).enumerate() {
            x[self.perm[slot]] = *v;
        }
        Ok(x)
    }

    /// `psi(y, t) = (phi(y), y) . gamma(t)`.
    pub fn psi(&self, y: &[f64], t: f64) -> Result<f64> {
        let phi = self.phi(y)?;
        let g = self.deriv(t, 0);
        Ok(phi.iter().chain(y.iter()).zip(&g).map(|(a, b)| a * b).sum())
    }

    /// `d_t^j grad_y psi(y, t)`.
    pub fn dt_grad_psi(&self, y: &[f64], t: f64, j: usize) -> Result<Vec<f64>> {
        let gp = self.grad_phi(y)?;
        let c = self.deriv(t, j);
        Ok((0..self.k)
            .map(|i| (0..self.l).map(|m| gp[(i, m)] * c[m]).sum::<f64>() + c[self.l + i])
            .collect())
    }

    /// Matrix with columns `d_t^{l+j} grad_y psi(g(t), t)`, `j = 1..k`.
    pub fn curvature(&self, t: f64) -> Result<DMatrix<f64>> {
        let y = self.g(t);
        let mut m = DMatrix::zeros(self.k, self.k);
        for j in 0..self.k {
            let col = self.dt_grad_psi(&y, t, self.l + 1 + j)?;
            for i in 0..self.k {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }
}

/// Build the k-dimensional submanifold of the construction and its surface measure.
pub fn submanifold_builder(d: usize, k: usize, curve: &Curve, extent: f64, resolution: usize) -> Result<(Submanifold, QuadMeasure)> {
    if curve.d() != d {
        return Err(Error::Argument("curve dimension differs from d".into()));
    }
    if k < 2 || k + 1 > d {
        return Err(Error::Argument(format!("k = {k} must satisfy 2 <= k <= d-1")));
    }
    if !(extent > 0.0) || resolution < 2 {
        return Err(Error::Argument("extent and resolution must be positive".into()));
    }
    let l = d - k;
    let grid: Vec<f64> = (0..=64).map(|i| -extent + 2.0 * extent * i as f64 / 64.0).collect();
    let mut chosen = None;
    for perm in permutations(d) {
        // only the split into (a, b) blocks and the order within them matter; keep canonical orders
        if perm[..l].windows(2).any(|w| w[0] > w[1]) || perm[l..].windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let c = permute_curve(curve, &perm)?;
        let sm = Submanifold { d, k, l, perm: perm.clone(), curve: c, extent };
        let ok = grid.iter().all(|&t| {
            let (a1, ..) = sm.blocks(t);
            let scale: f64 = a1.column_iter().map(|c| c.norm()).product::<f64>().max(1e-300);
            a1.determinant().abs() > 1e-8 * scale
        });
        if ok {
            chosen = Some(sm);
            break;
        }
    }
    let sm = chosen.ok_or_else(|| Error::Construction("A_1 singular for every coordinate split".into()))?;

    let (x, w) = gauss_legendre(resolution);
    let total = resolution.pow(k as u32);
    let mut nodes = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; k];
    for _ in 0..total {
        let y: Vec<f64> = idx.iter().map(|&j| extent * x[j]).collect();
        let gp = sm.grad_phi(&y)?;
        let gram = DMatrix::<f64>::identity(k, k) + &gp * gp.transpose();
        let area = gram.determinant().sqrt();
        let wt: f64 = idx.iter().map(|&j| extent * w[j]).product::<f64>() * area;
        nodes.extend(sm.embed(&y)?);
        weights.push(wt);
        for j in idx.iter_mut() {
            *j += 1;
            if *j < resolution {
                break;
            }
            *j = 0;
        }
    }
    let mu = QuadMeasure::new(d, nodes, weights, k as f64, Provenance::Submanifold, 2.0 * extent / resolution as f64, resolution)?;
    Ok((sm, mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_curve_graph_functions() {
        let c = Curve::moment(4);
        let (sm, _) = submanifold_builder(4, 2, &c, 1.0, 6).unwrap();
        assert_eq!(sm.perm, vec![0, 1, 2, 3]);
        let y = [0.3, -0.4];
        let phi = sm.phi(&y).unwrap();
        let (y1, y2) = (y[0], y[1]);
        assert!((phi[0] - (y1.powi(3) / 6.0 + y2.powi(4) / 12.0)).abs() < 1e-13);
        assert!((phi[1] - (-y1 * y1 / 2.0 - y2.powi(3) / 6.0)).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_k() {
        let c = Curve::moment(4);
        assert!(submanifold_builder(4, 1, &c, 1.0, 4).is_err());
        assert!(submanifold_builder(4, 4, &c, 1.0, 4).is_err());
    }
}
