use super::{num, upscale, Table};
use crate::curve::Curve;
use crate::engine::{field, required_spacing, Amplitude, Operator, PhaseSpec, ResolutionPolicy, TestFunction};
use crate::extremal::{calibrate_c, centred_indicator, knapp_box, partition_family, rademacher};
use crate::measure::chart_patch_measure;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct KhintchineConfig {
    pub curve: Curve,
    pub delta: f64,
    pub q: f64,
    /// Exponent of the upper chain `lambda^{-(d-1)} delta^{q/p}`.
    pub p: f64,
    pub lambdas: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Box constant; `None` calibrates every box and uses the smallest result throughout.
    pub c: Option<f64>,
    /// Amplitude equals 1 on `|y_i| <= radius` and vanishes beyond twice that.
    pub amplitude_radius: f64,
    /// Minimum chart nodes per axis.
    pub resolution: usize,
    pub strict: bool,
}

impl KhintchineConfig {
    pub fn new(curve: Curve, delta: f64, q: f64, lambdas: Vec<f64>) -> Self {
        KhintchineConfig {
            curve,
            delta,
            q,
            p: q,
            lambdas,
            n_samples: 64,
            seed: 0,
            c: None,
            amplitude_radius: 0.3,
            resolution: 64,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KhintchineRecord {
    pub lambda: f64,
    pub ell: usize,
    pub c: f64,
    /// Mean of `||sum eps_k T chi_{I_k}||_q^q` over the sign samples.
    pub mean: f64,
    pub stderr: f64,
    /// `lambda^{-q/(2d)} sum |P_k|`.
    pub lower: f64,
    pub ratio: f64,
    /// `lambda^{-(d-1)} delta^{q/p}`.
    pub upper: f64,
    pub nodes: usize,
}

impl KhintchineRecord {
    pub fn table(records: &[KhintchineRecord]) -> Table {
        let mut t = Table::new(&["lambda", "ell", "c", "mean", "stderr", "lower", "ratio", "upper", "mean_over_upper", "nodes"]);
        for r in records {
            t.push(vec![
                num(r.lambda),
                r.ell.to_string(),
                num(r.c),
                num(r.mean),
                num(r.stderr),
                num(r.lower),
                num(r.ratio),
                num(r.upper),
                num(r.mean / r.upper),
                r.nodes.to_string(),
            ]);
        }
        t
    }
}

/// Randomized lower bound: sign-averaged `L^q` mass of `sum eps_k T chi_{I_k}` against `lambda^{-q/(2d)} sum |P_k|`.
///
/// Each `chi_{I_k}` carries the factor `exp(-i lambda psi(y_k, t))`, which leaves `|f|` unchanged.
pub fn khintchine_experiment(cfg: &KhintchineConfig) -> Result<Vec<KhintchineRecord>> {
    if !(cfg.q >= 2.0) || cfg.q.is_infinite() {
        return Err(Error::Config(format!("q = {} must be finite and at least 2", cfg.q)));
    }
    if cfg.n_samples < 32 {
        return Err(Error::Config("at least 32 sign samples are needed".into()));
    }
    if cfg.lambdas.is_empty() {
        return Err(Error::Config("empty lambda list".into()));
    }
    let d = cfg.curve.d();
    let n = d - 1;
    let r = cfg.amplitude_radius;
    let phase = PhaseSpec::graph(cfg.curve.clone(), true).with_amplitude(Amplitude::window(vec![0.0; n], vec![r; n])?);
    let policy = if cfg.strict { ResolutionPolicy::Strict } else { ResolutionPolicy::Warn };

    let parts = cfg.lambdas.iter().map(|&l| partition_family(&phase, cfg.delta, l)).collect::<Result<Vec<_>>>()?;
    let c = match cfg.c {
        Some(c) => c,
        None => {
            let mut c: f64 = 1.0;
            for (part, &lambda) in parts.iter().zip(&cfg.lambdas) {
                for (k, (&t, iv)) in part.t.iter().zip(&part.intervals).enumerate() {
                    let ck = calibrate_c(&phase, t, lambda, *iv)
                        .map_err(|e| Error::Calibration(format!("lambda = {lambda}, interval {}: {e}", k + 1)))?;
                    c = c.min(ck);
                }
            }
            c
        }
    };

    let mut out = Vec::new();
    for (part, &lambda) in parts.iter().zip(&cfg.lambdas) {
        let inputs = part
            .intervals
            .iter()
            .zip(&part.y)
            .map(|(iv, y)| TestFunction::new(vec![centred_indicator(&phase, y, *iv, lambda, 1.0)?]))
            .collect::<Result<Vec<_>>>()?;
        let hull = TestFunction::indicator(0.0, cfg.delta)?;
        let lam_eff = phase.lambda_eff(lambda, &hull);
        let build = |res: usize| chart_patch_measure(&vec![0.0; n], &DMatrix::identity(n, n), &vec![2.0 * r; n], res, false);
        let need = required_spacing(&build(cfg.resolution)?, lam_eff);
        let mu = upscale(cfg.resolution, need, build)?;
        let fields = inputs
            .iter()
            .map(|f| field(Operator::Phase(&phase), lambda, f, &mu, policy))
            .collect::<Result<Vec<_>>>()?;

        let flat = rademacher(part.ell * cfg.n_samples, cfg.seed);
        let vals: Vec<f64> = flat
            .chunks(part.ell)
            .map(|signs| {
                (0..mu.len())
                    .map(|i| {
                        let z: Complex64 = fields.iter().zip(signs).map(|(fk, s)| fk[i] * *s).sum();
                        mu.weights()[i] * z.norm().powf(cfg.q)
                    })
                    .sum::<f64>()
            })
            .collect();
        let m = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / m;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        let mut vol = 0.0;
        for (k, &t) in part.t.iter().enumerate() {
            vol += knapp_box(&phase, t, lambda, c)
                .map_err(|e| Error::Stationary(format!("interval {}: {e}", k + 1)))?
                .volume;
        }
        let lower = lambda.powf(-cfg.q / (2.0 * d as f64)) * vol;
        let upper = lambda.powf(-(n as f64)) * cfg.delta.powf(cfg.q / cfg.p);
        out.push(KhintchineRecord {
            lambda,
            ell: part.ell,
            c,
            mean,
            stderr: (var / m).sqrt(),
            lower,
            ratio: mean / lower,
            upper,
            nodes: mu.len(),
        });
    }
    Ok(out)
}
