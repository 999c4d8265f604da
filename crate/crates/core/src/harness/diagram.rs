use super::{num, Table};
use crate::curve::Curve;
use crate::engine::{field, lq_norm, Operator, PhaseSpec, ResolutionPolicy, TestFunction};
use crate::exponents::{f, predicted_excess, sphere_region, ExponentPoint, Family, RegionClass};
use crate::extremal::{centred_indicator, default_rho, knapp_box, solve_stationary};
use crate::measure::chart_patch_measure;
use crate::{Error, Result};
use num_rational::Rational64;

/// Half-width of the band around zero excess excluded from sign comparisons.
pub const BOUNDARY_BAND: f64 = 0.02;

#[derive(Clone, Debug)]
pub struct DiagramConfig {
    pub curve: Curve,
    pub grid_n: usize,
    pub family: Family,
    pub lambdas: Vec<f64>,
    pub t0: f64,
    pub c: f64,
    pub per_axis: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagramCell {
    pub inv_p: Rational64,
    pub inv_q: Rational64,
    pub class: RegionClass,
    pub predicted: f64,
    pub measured: f64,
}

impl DiagramCell {
    pub fn off_band(&self) -> bool {
        self.predicted.abs() > BOUNDARY_BAND
    }

    pub fn agrees(&self) -> bool {
        (self.measured > 0.0) == (self.predicted > 0.0)
    }

    /// Fraction of off-band cells whose measured sign matches the prediction.
    pub fn agreement(cells: &[DiagramCell]) -> f64 {
        let off: Vec<&DiagramCell> = cells.iter().filter(|c| c.off_band()).collect();
        if off.is_empty() {
            return 1.0;
        }
        off.iter().filter(|c| c.agrees()).count() as f64 / off.len() as f64
    }

    pub fn table(cells: &[DiagramCell]) -> Table {
        let mut t = Table::new(&["inv_p", "inv_q", "class", "predicted_excess", "measured_excess", "off_band", "agree"]);
        for c in cells {
            t.push(vec![
                num(f(c.inv_p)),
                num(f(c.inv_q)),
                c.class.to_string(),
                num(c.predicted),
                num(c.measured),
                c.off_band().to_string(),
                c.agrees().to_string(),
            ]);
        }
        t
    }
}

/// Grid of `(1/p, 1/q)` cell centres in `[0,1]^2` with region class and two-lambda excess slope.
pub fn phase_diagram(cfg: &DiagramConfig) -> Result<Vec<DiagramCell>> {
    if cfg.lambdas.len() != 2 || cfg.lambdas[0] == cfg.lambdas[1] {
        return Err(Error::Config("phase diagram needs two distinct lambda values".into()));
    }
    if cfg.grid_n == 0 {
        return Err(Error::Config("grid size must be positive".into()));
    }
    if cfg.family != Family::Knapp {
        return Err(Error::Capability("phase diagrams are implemented for the knapp family".into()));
    }
    let d = cfg.curve.d();
    let phase = PhaseSpec::graph(cfg.curve.clone(), true);
    let rho = default_rho(d);
    let yk = solve_stationary(&phase, cfg.t0)?;
    let mut runs = Vec::new();
    for &lambda in &cfg.lambdas {
        let len = lambda.powf(-rho);
        let input = TestFunction::new(vec![centred_indicator(&phase, &yk, (cfg.t0, cfg.t0 + len), lambda, 1.0)?])?;
        let bx = knapp_box(&phase, cfg.t0, lambda, cfg.c)?;
        let map = bx.transform.transpose().try_inverse().ok_or_else(|| Error::Singular("curvature matrix is singular".into()))?;
        let mu = chart_patch_measure(&bx.center, &map, &bx.half_widths, cfg.per_axis, true)?;
        let fld = field(Operator::Extension(&cfg.curve), lambda, &input, &mu, ResolutionPolicy::Warn)?;
        runs.push((lambda, len, mu, fld));
    }
    let region = sphere_region(d)?;
    let n = cfg.grid_n as i64;
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let inv_p = Rational64::new(2 * i + 1, 2 * n);
            let inv_q = Rational64::new(2 * j + 1, 2 * n);
            let pt = ExponentPoint::new(inv_p, inv_q)?;
            let q = 1.0 / f(inv_q);
            let mut logs = Vec::new();
            for (lambda, len, mu, fld) in &runs {
                let t = lq_norm(fld, mu, q)?;
                let fnorm = len.powf(f(inv_p));
                logs.push(((t / (lambda.powf(-(d as f64 - 1.0) / q) * fnorm)).ln(), lambda.ln()));
            }
            let measured = (logs[1].0 - logs[0].0) / (logs[1].1 - logs[0].1);
            cells.push(DiagramCell {
                inv_p,
                inv_q,
                class: region.classify(pt),
                predicted: f(predicted_excess(pt, &cfg.family, d)?),
                measured,
            });
        }
    }
    Ok(cells)
}
