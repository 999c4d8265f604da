use super::{Provenance, QuadMeasure};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Surface measure of the unit circle (`d = 2`) or unit sphere (`d = 3`).
///
/// `d = 2`: `resolution` equispaced nodes. `d = 3`: `resolution` Gauss–Legendre
/// nodes in the polar cosine times `2 * resolution` azimuths.
pub fn sphere_measure(d: usize, resolution: usize) -> Result<QuadMeasure> {
    if resolution < 8 {
        return Err(Error::Argument("sphere resolution must be at least 8".into()));
    }
    match d {
        2 => {
            let n = resolution;
            let w = 2.0 * PI / n as f64;
            let mut nodes = Vec::with_capacity(2 * n);
            for j in 0..n {
                let th = w * j as f64;
                nodes.push(th.cos());
                nodes.push(th.sin());
            }
            let mut mu = QuadMeasure::new(2, nodes, vec![w; n], 1.0, Provenance::Sphere, w, n)?;
            mu.c_mu = Some(PI);
            Ok(mu)
        }
        3 => {
            let (z, wz) = gauss_legendre(resolution);
            let na = 2 * resolution;
            let wa = 2.0 * PI / na as f64;
            let mut nodes = Vec::with_capacity(3 * resolution * na);
            let mut weights = Vec::with_capacity(resolution * na);
            for (zi, wi) in z.iter().zip(&wz) {
                let r = (1.0 - zi * zi).sqrt();
                for j in 0..na {
                    let ph = wa * j as f64;
                    nodes.extend([r * ph.cos(), r * ph.sin(), *zi]);
                    weights.push(wi * wa);
                }
            }
            let spacing = PI / resolution as f64;
            let mut mu = QuadMeasure::new(3, nodes, weights, 2.0, Provenance::Sphere, spacing, resolution)?;
            mu.c_mu = Some(PI);
            Ok(mu)
        }
        _ => Err(Error::Capability(format!("sphere quadrature implemented for d = 2, 3 only (got {d})"))),
    }
}

/// Smallest resolution meeting the spacing rule for bandwidth `lambda_eff`.
///
/// Arc spacing at most `2 pi / (10 lambda_eff)` on the circle and angular spacing
/// at most `1 / (8 lambda_eff)` on the two-sphere.
pub fn sphere_resolution_for(d: usize, lambda_eff: f64, min: usize) -> usize {
    let r = match d {
        2 => (10.0 * lambda_eff).ceil(),
        _ => (8.0 * PI * lambda_eff).ceil(),
    };
    (r as usize).max(min).max(8)
}

/// Graph `phi(y) = 1 - sqrt(1 - |y|^2)` of the sphere near `-e_1` in the chart `y -> (phi(y) - 1, y)`.
#[derive(Clone, Copy, Debug)]
pub struct SphereCap {
    /// Base dimension `d - 1`.
    pub n: usize,
}

pub fn sphere_cap_graph(d: usize) -> Result<SphereCap> {
    if d < 2 {
        return Err(Error::Argument("d must be at least 2".into()));
    }
    Ok(SphereCap { n: d - 1 })
}

impl SphereCap {
    fn root(&self, y: &[f64]) -> Result<f64> {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        if y.len() != self.n {
            return Err(Error::Argument(format!("chart point has length {} (expected {})", y.len(), self.n)));
        }
        if r2 >= 1.0 {
            return Err(Error::Domain(format!("|y| = {} outside the unit ball", r2.sqrt())));
        }
        Ok((1.0 - r2).sqrt())
    }

    pub fn value(&self, y: &[f64]) -> Result<f64> {
        Ok(1.0 - self.root(y)?)
    }

    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        let s = self.root(y)?;
        Ok(y.iter().map(|v| v / s).collect())
    }

    /// `H_ij = delta_ij / s + y_i y_j / s^3`.
    pub fn hessian(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let s = self.root(y)?;
        let n = self.n;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let base = if i == j { 1.0 / s } else { 0.0 };
            base + y[i] * y[j] / (s * s * s)
        }))
    }

    /// Third derivatives `d_k H_ij`.
    pub fn hessian_derivative(&self, y: &[f64], k: usize) -> Result<DMatrix<f64>> {
        let s = self.root(y)?;
        let n = self.n;
        let s3 = s * s * s;
        let s5 = s3 * s * s;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let mut v = if i == j { y[k] / s3 } else { 0.0 };
            if i == k {
                v += y[j] / s3;
            }
            if j == k {
                v += y[i] / s3;
            }
            v + 3.0 * y[i] * y[j] * y[k] / s5
        }))
    }

    /// The sphere point `(phi(y) - 1, y)`.
    pub fn embed(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut x = Vec::with_capacity(self.n + 1);
        x.push(-self.root(y)?);
        x.extend_from_slice(y);
        Ok(x)
    }

    /// Surface element `sqrt(1 + |grad phi|^2) = 1 / sqrt(1 - |y|^2)`.
    pub fn area_element(&self, y: &[f64]) -> Result<f64> {
        Ok(1.0 / self.root(y)?)
    }
}

/// Gauss–Legendre sample of the chart parallelepiped `{center + L u : |u_i| <= w_i}`.
///
/// With `on_sphere` the nodes are the sphere points `(phi(y) - 1, y)` and weights
/// carry the surface element; otherwise nodes are the chart points with Lebesgue weights.
pub fn chart_patch_measure(
    center: &[f64],
    map: &DMatrix<f64>,
    half_widths: &[f64],
    per_axis: usize,
    on_sphere: bool,
) -> Result<QuadMeasure> {
    let n = center.len();
    if map.nrows() != n || map.ncols() != n || half_widths.len() != n {
        return Err(Error::Argument("patch shape mismatch".into()));
    }
    let per_axis = per_axis.max(2);
    let (x, w) = gauss_legendre(per_axis);
    let jac = map.determinant().abs();
    if !(jac > 0.0) {
        return Err(Error::Singular("patch map is singular".into()));
    }
    let cap = SphereCap { n };
    let total = per_axis.pow(n as u32);
    let dim = if on_sphere { n + 1 } else { n };
    let mut nodes = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let u = DVector::from_iterator(n, idx.iter().zip(half_widths).map(|(&j, h)| x[j] * h));
        let y = DVector::from_column_slice(center) + map * u;
        let mut wt = jac * idx.iter().zip(half_widths).map(|(&j, h)| w[j] * h).product::<f64>();
        if on_sphere {
            nodes.extend(cap.embed(y.as_slice())?);
            wt *= cap.area_element(y.as_slice())?;
        } else {
            nodes.extend(y.iter());
        }
        weights.push(wt);
        for j in idx.iter_mut() {
            *j += 1;
            if *j < per_axis {
                break;
            }
            *j = 0;
        }
    }
    let hmax = half_widths.iter().cloned().fold(0.0, f64::max);
    let norm = map.clone().svd(false, false).singular_values.max();
    let alpha = n as f64;
    let prov = if on_sphere { Provenance::Sphere } else { Provenance::Chart };
    QuadMeasure::new(dim, nodes, weights, alpha, prov, 2.0 * hmax * norm / per_axis as f64, per_axis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_mass() {
        let mu = sphere_measure(2, 1000).unwrap();
        assert!((mu.total_mass() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_second_moment() {
        let mu = sphere_measure(3, 32).unwrap();
        assert!((mu.integrate(|x| x[2] * x[2]) - 4.0 * PI / 3.0).abs() < 1e-6);
        assert!((mu.total_mass() - 4.0 * PI).abs() < 1e-3 * 4.0 * PI);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(sphere_measure(4, 16), Err(Error::Capability(_))));
    }

    #[test]
    fn cap_values() {
        let cap = sphere_cap_graph(3).unwrap();
        assert_eq!(cap.value(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(cap.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(cap.hessian(&[0.0, 0.0]).unwrap(), DMatrix::identity(2, 2));
        assert!((cap.value(&[0.3, 0.0]).unwrap() - (1.0 - 0.91f64.sqrt())).abs() < 1e-15);
        assert!(matches!(cap.value(&[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn patch_on_sphere_lies_on_sphere() {
        let m = DMatrix::identity(1, 1);
        let mu = chart_patch_measure(&[0.1], &m, &[0.05], 8, true).unwrap();
        for x in mu.nodes() {
            assert!((x[0] * x[0] + x[1] * x[1] - 1.0).abs() < 1e-14);
        }
        let arc = (0.15f64).asin() - (0.05f64).asin();
        assert!((mu.total_mass() - arc).abs() < 1e-12);
    }
}
