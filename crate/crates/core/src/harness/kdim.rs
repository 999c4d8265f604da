use super::{loglog_fit, num, Table};
use crate::curve::Curve;
use crate::engine::{field, Operator, PhaseSpec, ResolutionPolicy, TestFunction};
use crate::exponents::{f, kdim_threshold};
use crate::extremal::{centred_indicator, kdim_boxes};
use crate::measure::{chart_patch_measure, submanifold_builder};
use crate::{Error, Result};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct KdimConfig {
    pub d: usize,
    pub k: usize,
    pub curve: Curve,
    pub lambdas: Vec<f64>,
    pub q_list: Vec<f64>,
    /// Box constant, held fixed across lambda.
    pub c: f64,
    /// Parameter range `[0, delta]` that is partitioned.
    pub delta: f64,
    /// Half-size of the coordinate window of the graph.
    pub extent: f64,
    /// Gauss-Legendre nodes per box axis.
    pub per_axis: usize,
    pub strict: bool,
}

impl KdimConfig {
    pub fn new(d: usize, k: usize, curve: Curve, lambdas: Vec<f64>, q_list: Vec<f64>) -> Self {
        KdimConfig { d, k, curve, lambdas, q_list, c: 0.25, delta: 1.0, extent: 1.0, per_axis: 12, strict: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdimRecord {
    pub lambda: f64,
    pub q: f64,
    pub ell: usize,
    /// Mean of `|P_m|` over the boxes.
    pub mean_volume: f64,
    /// Mean of `int_{P_m} |T chi_{I_m}|^q dy / |I_m|^q`.
    pub mean_mass: f64,
    /// `lambda^{-q/(2d)} sum_m |P_m|`.
    pub lower_sum: f64,
    /// `lambda^{k - q/(2d) + 1/(2d)} mean |P_m|` (closed-form box volumes).
    pub closed_ratio: f64,
    /// The same with the measured field mass in place of `|P_m|`.
    pub numeric_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdimFit {
    pub q: f64,
    pub predicted: f64,
    pub closed_slope: f64,
    pub numeric_slope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdimResult {
    pub threshold: f64,
    pub records: Vec<KdimRecord>,
    pub fits: Vec<KdimFit>,
}

impl KdimResult {
    pub fn records_table(&self) -> Table {
        let mut t = Table::new(&["lambda", "q", "ell", "mean_volume", "mean_mass", "lower_sum", "closed_ratio", "numeric_ratio"]);
        for r in &self.records {
            t.push(vec![
                num(r.lambda),
                num(r.q),
                r.ell.to_string(),
                num(r.mean_volume),
                num(r.mean_mass),
                num(r.lower_sum),
                num(r.closed_ratio),
                num(r.numeric_ratio),
            ]);
        }
        t
    }

    pub fn fits_table(&self) -> Table {
        let mut t = Table::new(&["q", "threshold", "predicted_slope", "closed_slope", "numeric_slope"]);
        for g in &self.fits {
            t.push(vec![num(g.q), num(self.threshold), num(g.predicted), num(g.closed_slope), num(g.numeric_slope)]);
        }
        t
    }
}

/// Randomized lower bound on a k-dimensional graph: excess of `lambda^{-q/(2d)} sum |P_m|` over `lambda^{-k}`.
///
/// The sum over `~ lambda^{1/(2d)}` boxes is evaluated as `lambda^{1/(2d)}` times the box mean, so the
/// rounding of the box count does not enter the slopes.
pub fn kdim_experiment(cfg: &KdimConfig) -> Result<KdimResult> {
    if cfg.lambdas.len() < 2 || cfg.q_list.is_empty() {
        return Err(Error::Config("kdim needs at least two lambda values and one q".into()));
    }
    let threshold = f(kdim_threshold(cfg.d, cfg.k)?);
    let (sm, _) = submanifold_builder(cfg.d, cfg.k, &cfg.curve, cfg.extent, 2)?;
    let sm = Arc::new(sm);
    let phase = PhaseSpec::submanifold(sm.clone());
    let policy = if cfg.strict { ResolutionPolicy::Strict } else { ResolutionPolicy::Warn };
    let two_d = 2.0 * cfg.d as f64;
    let kf = cfg.k as f64;

    let mut records = Vec::new();
    for &lambda in &cfg.lambdas {
        let boxes = kdim_boxes(&sm, lambda, cfg.c, cfg.delta)?;
        let ell = boxes.len();
        let mut masses = vec![0.0; cfg.q_list.len()];
        let mut vol = 0.0;
        for (iv, bx) in &boxes {
            vol += bx.volume;
            let map = bx.transform.transpose().try_inverse().ok_or_else(|| Error::Singular("curvature matrix is singular".into()))?;
            let mu = chart_patch_measure(&bx.center, &map, &bx.half_widths, cfg.per_axis, false)?;
            let input = TestFunction::new(vec![centred_indicator(&phase, &bx.center, *iv, lambda, 1.0)?])?;
            let fld = field(Operator::Phase(&phase), lambda, &input, &mu, policy)?;
            let len = iv.1 - iv.0;
            for (m, &q) in masses.iter_mut().zip(&cfg.q_list) {
                let s: f64 = fld.iter().zip(mu.weights()).map(|(z, w)| w * z.norm().powf(q)).sum();
                *m += s / len.powf(q);
            }
        }
        let mean_volume = vol / ell as f64;
        for (&q, mass) in cfg.q_list.iter().zip(masses) {
            let mean_mass = mass / ell as f64;
            let scale = lambda.powf(kf - q / two_d + 1.0 / two_d);
            records.push(KdimRecord {
                lambda,
                q,
                ell,
                mean_volume,
                mean_mass,
                lower_sum: lambda.powf(-q / two_d) * vol,
                closed_ratio: scale * mean_volume,
                numeric_ratio: scale * mean_mass,
            });
        }
    }

    let mut fits = Vec::new();
    for &q in &cfg.q_list {
        let rows: Vec<&KdimRecord> = records.iter().filter(|r| r.q == q).collect();
        let lams: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
        let closed = loglog_fit(&lams, &rows.iter().map(|r| r.closed_ratio).collect::<Vec<_>>())?;
        let numeric = loglog_fit(&lams, &rows.iter().map(|r| r.numeric_ratio).collect::<Vec<_>>())?;
        fits.push(KdimFit { q, predicted: -(q - threshold) / two_d, closed_slope: closed.slope, numeric_slope: numeric.slope });
    }
    Ok(KdimResult { threshold, records, fits })
}
