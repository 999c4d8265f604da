use super::{Provenance, QuadMeasure};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Layout of the singular measure: zeroed coordinates, density coordinate, free coordinates.
struct Layout {
    d: usize,
    /// Index of the coordinate carrying `|s|^beta`.
    s_idx: usize,
    beta: f64,
    free: usize,
}

fn layout(d: usize, alpha: f64) -> Result<Layout> {
    let lo = (d as f64 - 2.0).max(0.0);
    if !(alpha > lo && alpha <= d as f64) {
        return Err(Error::Argument(format!("alpha = {alpha} outside ({lo}, {d}]")));
    }
    let m = alpha.ceil() as usize;
    let beta = alpha - m as f64;
    Ok(Layout { d, s_idx: d - m, beta, free: m - 1 })
}

/// Nodes/weights for `int_a^b |s|^beta g(s) ds`, exact in the weight on cells touching 0.
fn power_cell(a: f64, b: f64, beta: f64, n: usize, out: &mut Vec<(f64, f64)>) {
    let (x, w) = gauss_legendre(n);
    if a == 0.0 || b == 0.0 {
        // s = h v^{1/(beta+1)}: int_0^h s^beta g ds = h^{beta+1}/(beta+1) int_0^1 g(h v^{1/(beta+1)}) dv
        let (h, sign) = if a == 0.0 { (b, 1.0) } else { (-a, -1.0) };
        let e = 1.0 / (beta + 1.0);
        let mass = h.powf(beta + 1.0) / (beta + 1.0);
        for (xi, wi) in x.iter().zip(&w) {
            let v = 0.5 * (xi + 1.0);
            out.push((sign * h * v.powf(e), mass * 0.5 * wi));
        }
    } else {
        let hh = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(&w) {
            let s: f64 = c + hh * xi;
            out.push((s, hh * wi * s.abs().powf(beta)));
        }
    }
}

/// Free-coordinate rule on the `(free)`-ball of radius `r`.
fn free_rule(free: usize, r: f64, n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    Ok(match free {
        0 => vec![(vec![], 1.0)],
        1 => {
            let (x, w) = gauss_legendre(n);
            x.iter().zip(&w).map(|(xi, wi)| (vec![r * xi], r * wi)).collect()
        }
        2 => {
            let (x, w) = gauss_legendre(n);
            let na = 2 * n;
            let wa = 2.0 * PI / na as f64;
            let mut out = Vec::with_capacity(n * na);
            for (xi, wi) in x.iter().zip(&w) {
                let rho = 0.5 * r * (xi + 1.0);
                for j in 0..na {
                    let th = wa * j as f64;
                    out.push((vec![rho * th.cos(), rho * th.sin()], 0.5 * r * wi * rho * wa));
                }
            }
            out
        }
        _ => return Err(Error::Capability(format!("singular measure with {free} free coordinates"))),
    })
}

fn assemble(l: &Layout, s_rule: &[(f64, f64)], free_n: usize, window: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for &(s, ws) in s_rule {
        let rule = match window {
            None => free_rule(l.free, (1.0 - s * s).max(0.0).sqrt(), free_n)?,
            Some(w) => {
                let (x, gw) = gauss_legendre(free_n);
                let widths = &w[l.s_idx + 1..];
                let total = free_n.pow(l.free as u32);
                let mut out = Vec::with_capacity(total);
                let mut idx = vec![0usize; l.free];
                for _ in 0..total {
                    let p: Vec<f64> = idx.iter().zip(widths).map(|(&j, h)| h * x[j]).collect();
                    let wt: f64 = idx.iter().zip(widths).map(|(&j, h)| h * gw[j]).product();
                    out.push((p, wt));
                    for j in idx.iter_mut() {
                        *j += 1;
                        if *j < free_n {
                            break;
                        }
                        *j = 0;
                    }
                }
                out
            }
        };
        for (p, wf) in rule {
            let wt = ws * wf;
            if wt <= 0.0 {
                continue;
            }
            let mut x = vec![0.0; l.d];
            x[l.s_idx] = s;
            x[l.s_idx + 1..].copy_from_slice(&p);
            nodes.extend(x);
            weights.push(wt);
        }
    }
    Ok((nodes, weights))
}

/// `chi_{B(0,1)} prod delta(x_i) |x_{d-m+1}|^{alpha-m} dx_{d-m+1} ... dx_d` with `m = ceil(alpha)`.
///
/// `resolution` equal cells in the density coordinate; the weight `|s|^beta` is
/// integrated exactly on the two cells touching the origin.
pub fn singular_alpha_measure(d: usize, alpha: f64, resolution: usize) -> Result<QuadMeasure> {
    if resolution < 16 {
        return Err(Error::Argument("singular measure resolution must be at least 16".into()));
    }
    let l = layout(d, alpha)?;
    let cells = resolution + resolution % 2;
    let h = 2.0 / cells as f64;
    let mut s_rule = Vec::new();
    for c in 0..cells {
        let a = -1.0 + c as f64 * h;
        let b = if c + 1 == cells { 1.0 } else { a + h };
        let a = if c == cells / 2 { 0.0 } else { a };
        let b = if c + 1 == cells / 2 { 0.0 } else { b };
        power_cell(a, b, l.beta, 8, &mut s_rule);
    }
    let free_n = (resolution / 2).max(8);
    let (nodes, weights) = assemble(&l, &s_rule, free_n, None)?;
    let spacing = h.max(2.0 / free_n as f64);
    let mut mu = QuadMeasure::new(d, nodes, weights, alpha, Provenance::Singular, spacing, resolution)?;
    mu.c_mu = None;
    Ok(mu)
}

/// The singular measure restricted to the rectangle `{|x_i| <= half_widths[i]}` inside `B(0,1)`.
pub fn singular_window_measure(d: usize, alpha: f64, half_widths: &[f64], per_axis: usize) -> Result<QuadMeasure> {
    if half_widths.len() != d || half_widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Argument("window needs d positive half-widths".into()));
    }
    let l = layout(d, alpha)?;
    let corner: f64 = half_widths[l.s_idx..].iter().map(|w| w * w).sum();
    if corner > 1.0 {
        return Err(Error::Argument("window must lie inside the unit ball".into()));
    }
    let ws = half_widths[l.s_idx];
    let mut s_rule = Vec::new();
    power_cell(-ws, 0.0, l.beta, per_axis, &mut s_rule);
    power_cell(0.0, ws, l.beta, per_axis, &mut s_rule);
    let (nodes, weights) = assemble(&l, &s_rule, per_axis, Some(half_widths))?;
    let spacing = 2.0 * half_widths.iter().cloned().fold(0.0, f64::max) / per_axis as f64;
    QuadMeasure::new(d, nodes, weights, alpha, Provenance::Singular, spacing, per_axis)
}
