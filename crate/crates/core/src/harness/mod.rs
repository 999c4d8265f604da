//! Experiment drivers: lambda sweeps, the randomized lower bound, phase diagrams
//! and the k-dimensional necessity experiment.

mod diagram;
mod kdim;
mod khintchine;
mod sweep;

pub use diagram::{phase_diagram, DiagramCell, DiagramConfig};
pub use kdim::{kdim_experiment, KdimConfig, KdimFit, KdimRecord, KdimResult};
pub use khintchine::{khintchine_experiment, KhintchineConfig, KhintchineRecord};
pub use sweep::{decay_sweep, FamilySpec, MeasureSpec, SweepConfig, SweepFit, SweepRecord, SweepResult};

use crate::measure::QuadMeasure;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Ordinary least squares line with the RMS residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<Fit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::Argument("regression inputs differ in length".into()));
    }
    if n < 2 {
        return Err(Error::Argument("slope needs at least two lambda values".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Argument("regression abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok(Fit { slope, intercept, rms })
}

/// Slope of `log y` against `log lambda`.
pub fn loglog_fit(lambdas: &[f64], y: &[f64]) -> Result<Fit> {
    let lx: Vec<f64> = lambdas.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    ols(&lx, &ly)
}

/// CSV table with a header line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Float formatting used in every CSV.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.10e}")
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Field dump with columns `node_index, x_1..x_d, weight, re, im`.
pub fn field_table(mu: &QuadMeasure, field: &[num_complex::Complex64]) -> Table {
    let mut header = vec!["node_index".to_string()];
    header.extend((1..=mu.d()).map(|i| format!("x{i}")));
    header.extend(["weight", "re", "im"].map(String::from));
    let mut t = Table { header, rows: Vec::new() };
    for (i, z) in field.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(mu.node(i).iter().map(|v| num(*v)));
        row.extend([num(mu.weights()[i]), num(z.re), num(z.im)]);
        t.push(row);
    }
    t
}

/// Rebuild a measure with growing resolution until its spacing is at most `need`.
pub(crate) fn upscale(min: usize, need: f64, mut build: impl FnMut(usize) -> Result<QuadMeasure>) -> Result<QuadMeasure> {
    let mut res = min;
    let mut mu = build(res)?;
    for _ in 0..8 {
        if mu.spacing <= need {
            return Ok(mu);
        }
        let grow = (mu.spacing / need * 1.02 * res as f64).ceil() as usize;
        res = grow.max(res + 1);
        mu = build(res)?;
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_exact_line() {
        let f = ols(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15 && f.rms < 1e-15);
    }

    #[test]
    fn single_point_has_no_slope() {
        assert!(ols(&[1.0], &[2.0]).is_err());
    }
}
