use super::{loglog_fit, num, upscale, Fit, Table};
use crate::curve::Curve;
use crate::engine::{field_with_stats, lorentz_norm, lp_norm, lq_norm, required_spacing, Operator, PanelStats, PhaseSpec, ResolutionPolicy, Segment, TestFunction};
use crate::exponents::{f, predicted_excess, ExponentPoint, Family};
use crate::extremal::{bump_input, centred_indicator, default_rho, knapp_box, partition_family, rademacher, solve_stationary};
use crate::measure::{chart_patch_measure, hyperplane_measure, singular_alpha_measure, sphere_measure, QuadMeasure};
use crate::rational::from_f64;
use crate::{Error, Result};
use num_complex::Complex64;
use std::time::Instant;

/// Input family of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    /// `chi_J exp(-i lambda x_k . gamma)`, `J = [t0, t0 + lambda^{-rho}]`, `x_k` the sphere point over `g(t0)`.
    Knapp { rho: Option<f64>, t0: f64, c: f64 },
    /// `chi_{[0, eps0]} exp(-i lambda x0 . gamma)`.
    Bump { x0: Vec<f64>, eps0: f64 },
    /// `sum eps_k chi_{I_k}` on the `lambda^{-1/(2d)}` partition of `[0, delta]`.
    Random { delta: f64, n_samples: usize, seed: u64 },
}

/// Measure of a sweep; resolutions are minima, raised per lambda to meet the spacing rule.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    Sphere { resolution: usize },
    Singular { alpha: f64, resolution: usize },
    Hyperplane { normal: Vec<f64>, extent: f64, resolution: usize },
    /// The sphere over the Knapp parallelepiped of the Knapp family.
    KnappBox { per_axis: usize },
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub curve: Curve,
    pub measure: MeasureSpec,
    pub family: FamilySpec,
    pub lambdas: Vec<f64>,
    pub q_list: Vec<f64>,
    pub p_list: Vec<f64>,
    /// Normalise by `||f||_{L^{p,q}}` instead of `||f||_{L^p}`.
    pub lorentz: bool,
    pub strict: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.q_list.is_empty() || self.p_list.is_empty() {
            return Err(Error::Config("lambda, q and p lists must be non-empty".into()));
        }
        for (i, l) in self.lambdas.iter().enumerate() {
            if !(*l >= 16.0) {
                return Err(Error::Config(format!("lambda = {l} must be at least 16")));
            }
            if self.lambdas[..i].contains(l) {
                return Err(Error::Config(format!("lambda = {l} repeated")));
            }
        }
        if self.q_list.iter().chain(&self.p_list).any(|v| !(*v >= 1.0)) {
            return Err(Error::Config("p and q must be at least 1".into()));
        }
        if matches!(self.measure, MeasureSpec::KnappBox { .. }) && !matches!(self.family, FamilySpec::Knapp { .. }) {
            return Err(Error::Config("the knapp_box measure needs the knapp family".into()));
        }
        Ok(())
    }

    fn policy(&self) -> ResolutionPolicy {
        if self.strict {
            ResolutionPolicy::Strict
        } else {
            ResolutionPolicy::Warn
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub lambda: f64,
    pub p: f64,
    pub q: f64,
    pub f_norm: f64,
    pub t_norm: f64,
    /// Decay exponent `alpha / q` of the normalisation.
    pub s: f64,
    pub ratio: f64,
    pub nodes: usize,
    pub resolution: usize,
    pub panels: PanelStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFit {
    pub p: f64,
    pub q: f64,
    /// `log ||T f||` against `log lambda`.
    pub decay: Fit,
    /// `log ratio` against `log lambda`.
    pub excess: Fit,
    pub predicted_decay: Option<f64>,
    pub predicted_excess: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub fits: Vec<SweepFit>,
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl SweepResult {
    pub fn records_table(&self) -> Table {
        let mut t = Table::new(&[
            "lambda", "p", "q", "f_norm", "t_norm", "s", "ratio", "nodes", "resolution", "panels_min", "panels_max", "panels_mean",
        ]);
        for r in &self.records {
            t.push(vec![
                num(r.lambda),
                num(r.p),
                num(r.q),
                num(r.f_norm),
                num(r.t_norm),
                num(r.s),
                num(r.ratio),
                r.nodes.to_string(),
                r.resolution.to_string(),
                r.panels.min.to_string(),
                r.panels.max.to_string(),
                num(r.panels.mean),
            ]);
        }
        t
    }

    pub fn fits_table(&self) -> Table {
        let mut t = Table::new(&[
            "p", "q", "decay_slope", "decay_rms", "predicted_decay", "excess_slope", "excess_rms", "predicted_excess",
        ]);
        for g in &self.fits {
            t.push(vec![
                num(g.p),
                num(g.q),
                num(g.decay.slope),
                num(g.decay.rms),
                opt(g.predicted_decay),
                num(g.excess.slope),
                num(g.excess.rms),
                opt(g.predicted_excess),
            ]);
        }
        t
    }
}

fn inv(v: f64) -> f64 {
    if v.is_infinite() {
        0.0
    } else {
        1.0 / v
    }
}

/// The exponent point `(1/p, 1/q)` rounded to a nearby rational.
pub(crate) fn exponent_point(p: f64, q: f64) -> Result<ExponentPoint> {
    ExponentPoint::new(from_f64(inv(p), 1_000_000), from_f64(inv(q), 1_000_000))
}

/// Inputs for one lambda: the functions whose fields are needed and the sign patterns combining them.
struct Inputs {
    parts: Vec<TestFunction>,
    /// One row of signs per sample; a single all-ones row for deterministic families.
    signs: Vec<Vec<f64>>,
    combined: TestFunction,
}

fn inputs(cfg: &SweepConfig, lambda: f64) -> Result<Inputs> {
    let d = cfg.curve.d();
    match &cfg.family {
        FamilySpec::Bump { x0, eps0 } => {
            let f = bump_input(&cfg.curve, lambda, x0, *eps0)?;
            Ok(Inputs { parts: vec![f.clone()], signs: vec![vec![1.0]], combined: f })
        }
        FamilySpec::Knapp { rho, t0, .. } => {
            let phase = PhaseSpec::graph(cfg.curve.clone(), true);
            let rho = rho.unwrap_or(default_rho(d));
            let yk = solve_stationary(&phase, *t0)?;
            let seg = centred_indicator(&phase, &yk, (*t0, t0 + lambda.powf(-rho)), lambda, 1.0)?;
            let f = TestFunction::new(vec![seg])?;
            Ok(Inputs { parts: vec![f.clone()], signs: vec![vec![1.0]], combined: f })
        }
        FamilySpec::Random { delta, n_samples, seed } => {
            let phase = PhaseSpec::graph(cfg.curve.clone(), true);
            let part = partition_family(&phase, *delta, lambda)?;
            let parts = part.intervals.iter().map(|&(s, e)| TestFunction::indicator(s, e)).collect::<Result<Vec<_>>>()?;
            let flat = rademacher(part.ell * n_samples.max(&1), *seed);
            let signs: Vec<Vec<f64>> = flat.chunks(part.ell).map(<[f64]>::to_vec).collect();
            let combined = TestFunction::new(part.intervals.iter().map(|&(s, e)| Segment::indicator(s, e)).collect())?;
            Ok(Inputs { parts, signs, combined })
        }
    }
}

fn measure_for(cfg: &SweepConfig, lambda: f64, lam_eff: f64) -> Result<QuadMeasure> {
    let d = cfg.curve.d();
    let fit = |min: usize, build: &dyn Fn(usize) -> Result<QuadMeasure>| -> Result<QuadMeasure> {
        let probe = build(min)?;
        let need = required_spacing(&probe, lam_eff);
        upscale(min, need, build)
    };
    match &cfg.measure {
        MeasureSpec::Sphere { resolution } => fit(*resolution, &|r| sphere_measure(d, r)),
        MeasureSpec::Singular { alpha, resolution } => fit(*resolution, &|r| singular_alpha_measure(d, *alpha, r)),
        MeasureSpec::Hyperplane { normal, extent, resolution } => fit(*resolution, &|r| hyperplane_measure(normal, *extent, r)),
        MeasureSpec::KnappBox { per_axis } => {
            let FamilySpec::Knapp { t0, c, .. } = &cfg.family else {
                return Err(Error::Config("the knapp_box measure needs the knapp family".into()));
            };
            let phase = PhaseSpec::graph(cfg.curve.clone(), true);
            let bx = knapp_box(&phase, *t0, lambda, *c)?;
            let map = bx
                .transform
                .transpose()
                .try_inverse()
                .ok_or_else(|| Error::Singular("curvature matrix is singular".into()))?;
            chart_patch_measure(&bx.center, &map, &bx.half_widths, *per_axis, true)
        }
    }
}

/// `(sum w |sum_k eps_k F_k|^q)` for one sign row, or the sup for `q = inf`.
fn signed_power(fields: &[Vec<Complex64>], signs: &[f64], mu: &QuadMeasure, q: f64) -> f64 {
    let n = mu.len();
    let mut acc = 0.0;
    let mut sup: f64 = 0.0;
    for i in 0..n {
        let z: Complex64 = fields.iter().zip(signs).map(|(fk, s)| fk[i] * *s).sum();
        let a = z.norm();
        if q.is_infinite() {
            sup = sup.max(a);
        } else {
            acc += mu.weights()[i] * a.powf(q);
        }
    }
    if q.is_infinite() {
        sup
    } else {
        acc
    }
}

/// Run a lambda sweep and fit decay and excess slopes per `(p, q)`.
pub fn decay_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let d = cfg.curve.d();
    let mut records = Vec::new();
    for &lambda in &cfg.lambdas {
        let start = Instant::now();
        let inp = inputs(cfg, lambda)?;
        let lam_eff = crate::engine::lambda_eff(&cfg.curve, lambda, &inp.combined);
        let mu = measure_for(cfg, lambda, lam_eff)?;
        let mut fields = Vec::with_capacity(inp.parts.len());
        let mut panels = PanelStats { min: usize::MAX, max: 0, mean: 0.0 };
        for part in &inp.parts {
            let (fld, st) = field_with_stats(Operator::Extension(&cfg.curve), lambda, part, &mu, cfg.policy())?;
            panels.min = panels.min.min(st.min);
            panels.max = panels.max.max(st.max);
            panels.mean += st.mean;
            fields.push(fld);
        }
        if inp.parts.is_empty() {
            panels.min = 0;
        }
        for &q in &cfg.q_list {
            let t_norm = if inp.signs.len() == 1 && inp.parts.len() == 1 {
                lq_norm(&fields[0], &mu, q)?
            } else {
                let mean = inp.signs.iter().map(|s| signed_power(&fields, s, &mu, q)).sum::<f64>() / inp.signs.len() as f64;
                if q.is_infinite() {
                    mean
                } else {
                    mean.powf(1.0 / q)
                }
            };
            for &p in &cfg.p_list {
                let f_norm = if cfg.lorentz { lorentz_norm(&inp.combined, p, q)? } else { lp_norm(&inp.combined, p)? };
                let s = mu.alpha / q;
                records.push(SweepRecord {
                    lambda,
                    p,
                    q,
                    f_norm,
                    t_norm,
                    s,
                    ratio: t_norm / (lambda.powf(-s) * f_norm),
                    nodes: mu.len(),
                    resolution: mu.resolution,
                    panels,
                });
            }
        }
        log::info!("lambda = {lambda}: {} nodes in {:.2?}", mu.len(), start.elapsed());
    }

    let mut fits = Vec::new();
    for &q in &cfg.q_list {
        for &p in &cfg.p_list {
            let rows: Vec<&SweepRecord> = records.iter().filter(|r| r.p == p && r.q == q).collect();
            let lams: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
            let decay = loglog_fit(&lams, &rows.iter().map(|r| r.t_norm).collect::<Vec<_>>())?;
            let excess = loglog_fit(&lams, &rows.iter().map(|r| r.ratio).collect::<Vec<_>>())?;
            let s = rows[0].s;
            let pt = exponent_point(p, q)?;
            let (predicted_decay, predicted_excess) = match &cfg.family {
                FamilySpec::Bump { .. } => (Some(-s), Some(0.0)),
                FamilySpec::Knapp { rho, .. } if rho.is_none_or(|r| r == default_rho(d)) => (None, Some(f(predicted_excess(pt, &Family::Knapp, d)?))),
                FamilySpec::Random { .. } => (None, Some(f(predicted_excess(pt, &Family::Random, d)?))),
                _ => (None, None),
            };
            fits.push(SweepFit { p, q, decay, excess, predicted_decay, predicted_excess });
        }
    }
    Ok(SweepResult { records, fits })
}
