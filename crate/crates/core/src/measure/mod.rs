//! Quadrature representations of the measures used by the experiments.

mod audit;
mod singular;
mod sphere;
mod submanifold;

pub use audit::dimension_audit;
pub use singular::{singular_alpha_measure, singular_window_measure};
pub use sphere::{chart_patch_measure, sphere_cap_graph, sphere_measure, sphere_resolution_for, SphereCap};
pub use submanifold::{submanifold_builder, Submanifold};

use crate::curve::TypeTuple;
use crate::{Error, Result};
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Sphere,
    Hyperplane,
    Singular,
    Pushforward,
    Scaled,
    Submanifold,
    /// Lebesgue or surface measure sampled in chart coordinates.
    Chart,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::Sphere => "sphere",
            Provenance::Hyperplane => "hyperplane",
            Provenance::Singular => "singular",
            Provenance::Pushforward => "pushforward",
            Provenance::Scaled => "scaled",
            Provenance::Submanifold => "submanifold",
            Provenance::Chart => "chart",
        };
        f.write_str(s)
    }
}

/// A positive measure on `R^d` given by weighted nodes.
#[derive(Clone, Debug)]
pub struct QuadMeasure {
    d: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub alpha: f64,
    pub c_mu: Option<f64>,
    pub provenance: Provenance,
    /// Typical node spacing, used for resolution checks and the audit floor.
    pub spacing: f64,
    /// Builder resolution parameter.
    pub resolution: usize,
}

impl QuadMeasure {
    pub fn new(
        d: usize,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        alpha: f64,
        provenance: Provenance,
        spacing: f64,
        resolution: usize,
    ) -> Result<Self> {
        if d == 0 || nodes.len() != d * weights.len() {
            return Err(Error::Argument("node/weight shape mismatch".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Argument("weights must be positive and finite".into()));
        }
        if nodes.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite node".into()));
        }
        Ok(QuadMeasure { d, nodes, weights, alpha, c_mu: None, provenance, spacing, resolution })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.d..(i + 1) * self.d]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.d)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `int F dmu`, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.nodes().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    /// Largest distance between two nodes' bounding-box corners.
    pub fn diameter(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.d];
        let mut hi = vec![f64::NEG_INFINITY; self.d];
        for x in self.nodes() {
            for i in 0..self.d {
                lo[i] = lo[i].min(x[i]);
                hi[i] = hi[i].max(x[i]);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

/// Graph `x_k = h . xbar` over `|xbar_i| <= extent`, cell-centred grid.
pub fn hyperplane_measure(c_normal: &[f64], extent: f64, resolution: usize) -> Result<QuadMeasure> {
    let d = c_normal.len();
    if d < 2 {
        return Err(Error::Argument("normal must have at least two entries".into()));
    }
    if c_normal.iter().all(|c| *c == 0.0) {
        return Err(Error::Argument("zero normal".into()));
    }
    if !(extent > 0.0) || resolution == 0 {
        return Err(Error::Argument("extent and resolution must be positive".into()));
    }
    let mut k = 0;
    for i in 1..d {
        if c_normal[i].abs() > c_normal[k].abs() {
            k = i;
        }
    }
    let h: Vec<f64> = (0..d).filter(|&i| i != k).map(|i| -c_normal[i] / c_normal[k]).collect();
    let area = (1.0 + h.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let step = 2.0 * extent / resolution as f64;
    let cell = step.powi(d as i32 - 1);
    let m = d - 1;
    let total = resolution.pow(m as u32);
    let mut nodes = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let xbar: Vec<f64> = idx.iter().map(|&j| -extent + (j as f64 + 0.5) * step).collect();
        let xk: f64 = h.iter().zip(&xbar).map(|(a, b)| a * b).sum();
        let mut it = xbar.iter();
        for i in 0..d {
            nodes.push(if i == k { xk } else { *it.next().unwrap() });
        }
        weights.push(area * cell);
        for j in idx.iter_mut() {
            *j += 1;
            if *j < resolution {
                break;
            }
            *j = 0;
        }
    }
    let mut mu = QuadMeasure::new(d, nodes, weights, (d - 1) as f64, Provenance::Hyperplane, step * area, resolution)?;
    mu.c_mu = None;
    Ok(mu)
}

/// Nodes mapped by `linear_map^T`, weights scaled by `mass_scale`.
pub fn pushforward_measure(mu: &QuadMeasure, linear_map: &DMatrix<f64>, mass_scale: f64) -> Result<QuadMeasure> {
    let d = mu.d;
    if linear_map.nrows() != d || linear_map.ncols() != d || linear_map.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("linear map must be a finite d x d matrix".into()));
    }
    if !(mass_scale > 0.0) {
        return Err(Error::Argument("mass scale must be positive".into()));
    }
    let mut nodes = Vec::with_capacity(mu.nodes.len());
    for x in mu.nodes() {
        for j in 0..d {
            nodes.push((0..d).map(|i| linear_map[(i, j)] * x[i]).sum());
        }
    }
    let weights = mu.weights.iter().map(|w| w * mass_scale).collect();
    let norm = linear_map.clone().svd(false, false).singular_values.max();
    QuadMeasure::new(d, nodes, weights, mu.alpha, Provenance::Pushforward, mu.spacing * norm, mu.resolution)
}

/// `int F dmu_l = 2^{-l kappa} int F(D^a_{2^{-l}} x) dmu(x)`.
pub fn scaled_measure(mu: &QuadMeasure, a: &TypeTuple, ell: u32, kappa_val: f64) -> Result<QuadMeasure> {
    let d = mu.d;
    if a.d() != d {
        return Err(Error::Argument("type tuple length differs from measure dimension".into()));
    }
    let scale: Vec<f64> = a.as_slice().iter().map(|&ai| 2f64.powi(-(ell as i32) * ai as i32)).collect();
    let mut nodes = Vec::with_capacity(mu.nodes.len());
    for x in mu.nodes() {
        nodes.extend(x.iter().zip(&scale).map(|(v, s)| v * s));
    }
    let m = 2f64.powf(-(ell as f64) * kappa_val);
    let weights = mu.weights.iter().map(|w| w * m).collect();
    let smax = scale.iter().cloned().fold(0.0, f64::max);
    QuadMeasure::new(d, nodes, weights, mu.alpha, Provenance::Scaled, mu.spacing * smax, mu.resolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_hyperplane_mass() {
        let mu = hyperplane_measure(&[0.0, 0.0, 1.0], 1.0, 20).unwrap();
        assert!((mu.total_mass() - 4.0).abs() < 1e-12);
        assert!(mu.nodes().all(|x| x[2] == 0.0));
    }

    #[test]
    fn tilted_hyperplane_weight() {
        let s = 1.0 / 2f64.sqrt();
        let mu = hyperplane_measure(&[s, s, 0.0], 1.0, 10).unwrap();
        let cell = 0.2f64 * 0.2;
        assert!((mu.weights()[0] / cell - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn e1_normal_graph() {
        let mu = hyperplane_measure(&[1.0, 0.0, 0.0], 1.0, 4).unwrap();
        assert!(mu.nodes().all(|x| x[0] == 0.0));
    }

    #[test]
    fn rejects_zero_normal() {
        assert!(hyperplane_measure(&[0.0, 0.0], 1.0, 4).is_err());
    }
}
