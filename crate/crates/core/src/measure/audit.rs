use super::QuadMeasure;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Monte Carlo estimate of `sup mu(B(x, r)) / r^alpha`.
///
/// Centres are random nodes jittered within the radius floor, radii are
/// log-uniform in `[4 * spacing, diameter]`. Samples are drawn sequentially from
/// `seed` and evaluated in parallel; the supremum does not depend on the schedule.
pub fn dimension_audit(mu: &QuadMeasure, alpha: f64, n_samples: usize, seed: u64) -> Result<f64> {
    if mu.is_empty() {
        return Err(Error::Argument("empty measure".into()));
    }
    if n_samples < 100 {
        return Err(Error::Argument("dimension audit needs at least 100 samples".into()));
    }
    let d = mu.d();
    let diam = mu.diameter().max(f64::MIN_POSITIVE);
    let floor = (4.0 * mu.spacing).min(diam);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(Vec<f64>, f64)> = (0..n_samples)
        .map(|_| {
            let i = rng.gen_range(0..mu.len());
            let x: Vec<f64> = mu.node(i).iter().map(|v| v + floor * rng.gen_range(-1.0..1.0)).collect();
            let r = if diam > floor { floor * (diam / floor).powf(rng.gen::<f64>()) } else { diam };
            (x, r)
        })
        .collect();

    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|&a, &b| mu.node(a)[0].total_cmp(&mu.node(b)[0]));
    let keys: Vec<f64> = order.iter().map(|&i| mu.node(i)[0]).collect();

    let best = samples
        .par_iter()
        .map(|(x, r)| {
            let lo = keys.partition_point(|k| *k < x[0] - r);
            let hi = keys.partition_point(|k| *k <= x[0] + r);
            let r2 = r * r;
            let mass: f64 = order[lo..hi]
                .iter()
                .filter(|&&i| {
                    let y = mu.node(i);
                    (0..d).map(|j| (y[j] - x[j]) * (y[j] - x[j])).sum::<f64>() <= r2
                })
                .map(|&i| mu.weights()[i])
                .sum();
            mass / r.powf(alpha)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::sphere_measure;

    #[test]
    fn deterministic_for_seed() {
        let mu = sphere_measure(2, 256).unwrap();
        let a = dimension_audit(&mu, 1.0, 500, 9).unwrap();
        let b = dimension_audit(&mu, 1.0, 500, 9).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn rejects_few_samples() {
        let mu = sphere_measure(2, 64).unwrap();
        assert!(dimension_audit(&mu, 1.0, 10, 0).is_err());
    }
}
