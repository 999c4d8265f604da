//! Command-line front end. Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

use crate::config::{self, parse_list, parse_real, Document, RunOptions};
use crate::curve::{Curve, TypeTuple, DET_TOL};
use crate::exponents::{beta, f, finite_type_region, hyperplane_omega, kappa, kdim_threshold, sphere_region, Family};
use crate::extremal::{calibrate_c, default_rho, knapp_box, partition_family};
use crate::engine::PhaseSpec;
use crate::harness::{
    decay_sweep, kdim_experiment, khintchine_experiment, num, phase_diagram, DiagramCell, DiagramConfig, KdimConfig,
    KhintchineConfig, KhintchineRecord, Table,
};
use crate::measure::{dimension_audit, hyperplane_measure, scaled_measure, singular_alpha_measure, sphere_measure};
use crate::rational::parse_rational;
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

const CSV_HELP: &str = "\
CSV outputs (one header line, floats in %.10e):
  sweep          lambda,p,q,f_norm,t_norm,s,ratio,nodes,resolution,panels_min,panels_max,panels_mean
                 then (to <out>.fits.csv) p,q,decay_slope,decay_rms,predicted_decay,excess_slope,excess_rms,predicted_excess
  knapp          k,t_k,center_1..,half_width_1..,volume,calibrated_c
  random-lower   lambda,ell,c,mean,stderr,lower,ratio,upper,mean_over_upper,nodes
  phase-diagram  inv_p,inv_q,class,predicted_excess,measured_excess,off_band,agree
  kdim           lambda,q,ell,mean_volume,mean_mass,lower_sum,closed_ratio,numeric_ratio
                 then (to <out>.fits.csv) q,threshold,predicted_slope,closed_slope,numeric_slope
  audit-measure  measure,d,alpha,resolution,ell,nodes,spacing,c_hat

Config files use [curve], [measure], [family] and [sweep] sections of `key = value` lines.
RLAB_THREADS is used when --threads is absent.";

#[derive(Parser, Debug)]
#[command(name = "rlab", version, about = "Numerical laboratory for curve extension operators", after_help = CSV_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for random sign draws and audits.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output CSV path (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Treat resolution warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
    Markdown,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AuditKind {
    Sphere,
    Singular,
    Hyperplane,
    Scaled,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exponent thresholds and critical lines.
    Exponents {
        #[arg(long)]
        d: usize,
        /// Curve for the finite-type scan, e.g. `poly([[0,1],[0,0,1/2],[0,0,0,0,1/24]])`.
        #[arg(long)]
        curve: Option<String>,
        /// Hyperplane normal, comma separated.
        #[arg(long)]
        normal: Option<String>,
        /// Measure dimension for the alpha-dimensional region.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Lambda sweep from a config file.
    Sweep,
    /// Knapp boxes with calibrated constants.
    Knapp {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value = "0")]
        t0: String,
        /// Fixed box constant (calibrated when absent).
        #[arg(long)]
        c: Option<String>,
        /// Boxes for the partition of [0, delta] instead of a single box at t0.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Randomized lower bound with sign averages.
    RandomLower {
        #[arg(long, default_value = "2")]
        d: usize,
        #[arg(long, default_value = "1/4")]
        delta: String,
        #[arg(long, default_value = "3")]
        q: String,
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value = "2^8,2^10,2^12")]
        lambda: String,
        #[arg(long, default_value = "64")]
        samples: usize,
        #[arg(long)]
        c: Option<String>,
    },
    /// Grid of region classes and measured excess slopes.
    PhaseDiagram {
        #[arg(long, default_value = "2")]
        d: usize,
        #[arg(long, default_value = "20")]
        grid: usize,
        /// Two lambda values.
        #[arg(long, default_value = "2^8,2^10")]
        lambda: String,
        #[arg(long, default_value = "0")]
        t0: String,
        #[arg(long, default_value = "1/2")]
        c: String,
        #[arg(long, default_value = "32")]
        per_axis: usize,
    },
    /// Hyperplane index omega of the projected moment curve.
    Hyperplane {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        normal: String,
    },
    /// Randomized lower bound on a k-dimensional graph.
    Kdim {
        #[arg(long, default_value = "4")]
        d: usize,
        #[arg(long, default_value = "2")]
        k: usize,
        #[arg(long, default_value = "2^4,2^5")]
        lambda: String,
        #[arg(long, default_value = "7,8,10")]
        q: String,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        per_axis: Option<usize>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Monte Carlo estimate of sup mu(B(x,r)) / r^alpha.
    AuditMeasure {
        #[arg(long, value_enum)]
        measure: AuditKind,
        #[arg(long)]
        d: usize,
        /// Exponent tested by the audit (defaults to the measure's dimension).
        #[arg(long)]
        alpha: Option<String>,
        /// Dimension of the singular measure.
        #[arg(long)]
        measure_alpha: Option<String>,
        #[arg(long)]
        normal: Option<String>,
        #[arg(long, default_value = "64")]
        resolution: String,
        /// Dyadic scales for the scaled measure.
        #[arg(long, default_value = "0")]
        ell: String,
        #[arg(long, default_value = "2000")]
        samples: usize,
    },
}

/// Run the CLI on `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                2
            } else {
                3
            }
        }
    }
}

fn threads(g: &Global) -> Result<Option<usize>> {
    match g.threads {
        Some(n) => Ok(Some(n)),
        None => match std::env::var("RLAB_THREADS") {
            Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Config(format!("RLAB_THREADS = '{v}' is not an integer"))),
            Err(_) => Ok(None),
        },
    }
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = threads(&cli.global)? {
        if n == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("thread pool already initialised");
        }
    }
    let g = &cli.global;
    let doc = g.config.as_deref().map(Document::load).transpose()?;
    match &cli.cmd {
        Cmd::Exponents { d, curve, normal, alpha, format } => {
            let curve = curve.as_deref().map(Curve::parse).transpose()?;
            let normal = normal.as_deref().map(parse_rationals).transpose()?;
            let alpha = alpha.as_deref().map(parse_rational).transpose()?;
            let s = exponents_table(*d, curve.as_ref(), normal.as_deref(), alpha)?;
            emit_text(g.out.as_deref(), &render(&s, *format))
        }
        Cmd::Sweep => {
            let doc = doc.ok_or_else(|| Error::Config("sweep needs --config FILE".into()))?;
            let (mut cfg, opts) = config::sweep_config(&doc)?;
            cfg.strict |= g.strict;
            if let (crate::harness::FamilySpec::Random { seed, .. }, Some(s)) = (&mut cfg.family, g.seed) {
                *seed = s;
            }
            let res = decay_sweep(&cfg)?;
            emit_pair(out_path(g, &opts).as_deref(), &res.records_table(), &res.fits_table())
        }
        Cmd::Knapp { d, lambda, t0, c, delta, curve } => {
            let curve = curve_or_moment(curve.as_deref(), *d)?;
            let lambda = parse_real(lambda)?;
            let t0 = parse_real(t0)?;
            let c = c.as_deref().map(parse_real).transpose()?;
            let delta = delta.as_deref().map(parse_real).transpose()?;
            emit(g.out.as_deref(), &knapp_table(&curve, lambda, t0, c, delta)?)
        }
        Cmd::RandomLower { d, delta, q, p, lambda, samples, c } => {
            let (mut cfg, opts) = match &doc {
                Some(doc) => config::khintchine_config(doc)?,
                None => {
                    let q = parse_real(q)?;
                    let mut cfg = KhintchineConfig::new(Curve::moment(*d), parse_real(delta)?, q, parse_list(lambda)?);
                    cfg.p = p.as_deref().map(parse_real).transpose()?.unwrap_or(q);
                    cfg.n_samples = *samples;
                    (cfg, RunOptions::default())
                }
            };
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            cfg.c = c.as_deref().map(parse_real).transpose()?;
            cfg.strict |= g.strict;
            let recs = khintchine_experiment(&cfg)?;
            emit(out_path(g, &opts).as_deref(), &KhintchineRecord::table(&recs))
        }
        Cmd::PhaseDiagram { d, grid, lambda, t0, c, per_axis } => {
            let cfg = DiagramConfig {
                curve: Curve::moment(*d),
                grid_n: *grid,
                family: Family::Knapp,
                lambdas: parse_list(lambda)?,
                t0: parse_real(t0)?,
                c: parse_real(c)?,
                per_axis: *per_axis,
            };
            let cells = phase_diagram(&cfg)?;
            eprintln!("sign agreement on off-band cells: {:.4}", DiagramCell::agreement(&cells));
            emit(g.out.as_deref(), &DiagramCell::table(&cells))
        }
        Cmd::Hyperplane { d, normal } => {
            let c = parse_rationals(normal)?;
            let omega = hyperplane_omega(&c, *d)?;
            let base = d * (d - 1) / 2;
            let mut s = String::new();
            let _ = writeln!(s, "omega={omega}");
            let _ = writeln!(s, "q_c={}", base + 1);
            let _ = writeln!(s, "line {}", line_text(Rational64::from_integer((base as u32 + omega) as i64)));
            emit_text(g.out.as_deref(), &s)
        }
        Cmd::Kdim { d, k, lambda, q, c, per_axis, curve } => {
            let curve = curve_or_moment(curve.as_deref(), *d)?;
            let mut cfg = KdimConfig::new(*d, *k, curve, parse_list(lambda)?, parse_list(q)?);
            if let Some(c) = c {
                cfg.c = parse_real(c)?;
            }
            if let Some(n) = per_axis {
                cfg.per_axis = *n;
            }
            cfg.strict = g.strict;
            let res = kdim_experiment(&cfg)?;
            emit_pair(g.out.as_deref(), &res.records_table(), &res.fits_table())
        }
        Cmd::AuditMeasure { measure, d, alpha, measure_alpha, normal, resolution, ell, samples } => {
            let res: Vec<usize> = parse_list(resolution)?.into_iter().map(|v| v as usize).collect();
            let ells: Vec<u32> = parse_list(ell)?.into_iter().map(|v| v as u32).collect();
            let alpha = alpha.as_deref().map(parse_real).transpose()?;
            let m_alpha = measure_alpha.as_deref().map(parse_real).transpose()?;
            let normal = normal.as_deref().map(parse_list).transpose()?;
            let t = audit_table(*measure, *d, alpha, m_alpha, normal.as_deref(), &res, &ells, *samples, g.seed.unwrap_or(0))?;
            emit(g.out.as_deref(), &t)
        }
    }
}

fn out_path(g: &Global, opts: &RunOptions) -> Option<PathBuf> {
    g.out.clone().or_else(|| opts.out.clone())
}

fn curve_or_moment(spec: Option<&str>, d: usize) -> Result<Curve> {
    let c = match spec {
        Some(s) => Curve::parse(s)?,
        None => Curve::moment(d),
    };
    if c.d() != d {
        return Err(Error::Config(format!("curve has dimension {} but --d is {d}", c.d())));
    }
    Ok(c)
}

fn parse_rationals(s: &str) -> Result<Vec<Rational64>> {
    let s = s.trim();
    let s = s.strip_prefix('[').and_then(|v| v.strip_suffix(']')).unwrap_or(s);
    s.split(',').map(parse_rational).collect()
}

fn emit_text(out: Option<&Path>, s: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, s)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(s.as_bytes())?;
        }
    }
    Ok(())
}

fn emit(out: Option<&Path>, t: &Table) -> Result<()> {
    emit_text(out, &t.to_csv())
}

/// `<stem>.fits.csv` next to `out`.
pub fn fits_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.fits.csv"))
}

fn emit_pair(out: Option<&Path>, records: &Table, fits: &Table) -> Result<()> {
    match out {
        Some(p) => {
            records.write(p)?;
            fits.write(&fits_path(p))
        }
        None => emit_text(None, &format!("{}\n{}", records.to_csv(), fits.to_csv())),
    }
}

/// `1/p+c/q=1` with a parenthesised fractional coefficient.
pub fn line_text(c: Rational64) -> String {
    if c.is_integer() {
        format!("1/p+{c}/q=1")
    } else {
        format!("1/p+({c})/q=1")
    }
}

/// Rows `(quantity, value)` of the exponent report.
pub fn exponents_table(d: usize, curve: Option<&Curve>, normal: Option<&[Rational64]>, alpha: Option<Rational64>) -> Result<Vec<(String, String)>> {
    let reg = sphere_region(d)?;
    let mut rows = vec![
        ("d".to_string(), d.to_string()),
        ("q_c".to_string(), reg.q_threshold.to_string()),
        ("line".to_string(), line_text(reg.line_coef.expect("sphere region has a line"))),
        ("beta".to_string(), beta(d, Rational64::from_integer(d as i64 - 1))?.to_string()),
    ];
    for k in 2..d {
        rows.push((format!("kdim_threshold_k{k}"), kdim_threshold(d, k)?.to_string()));
    }
    if let Some(c) = curve {
        if c.d() != d {
            return Err(Error::Config(format!("curve has dimension {} but --d is {d}", c.d())));
        }
        let scan = c.type_scan(512, 2 * d as u32, DET_TOL)?;
        let km = Rational64::from_integer(scan.kappa_max() as i64);
        rows.push(("kappa_max".into(), km.to_string()));
        rows.push(("kappa_max_type".into(), fmt_tuple(&scan.a_kappa)));
        rows.push(("kappa_max_at".into(), format!("{}", scan.t_kappa)));
        let ft = finite_type_region(km, d)?;
        rows.push(("finite_type_line".into(), line_text(ft.line_coef.expect("finite-type region has a line"))));
        if let Some(al) = alpha {
            rows.push(("kappa_alpha".into(), kappa(&scan.a_kappa, al)?.to_string()));
        }
    }
    if let Some(al) = alpha {
        rows.push(("alpha".into(), al.to_string()));
        rows.push(("beta_alpha".into(), beta(d, al)?.to_string()));
    }
    if let Some(n) = normal {
        let omega = hyperplane_omega(n, d)?;
        let base = (d * (d - 1) / 2) as i64;
        rows.push(("omega".into(), omega.to_string()));
        rows.push(("hyperplane_q_c".into(), (base + 1).to_string()));
        rows.push(("hyperplane_line".into(), line_text(Rational64::from_integer(base + omega as i64))));
    }
    Ok(rows)
}

fn fmt_tuple(a: &TypeTuple) -> String {
    let v: Vec<String> = a.as_slice().iter().map(|x| x.to_string()).collect();
    format!("({})", v.join(";"))
}

fn render(rows: &[(String, String)], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Text => {
            for (k, v) in rows {
                if k == "line" {
                    let _ = writeln!(s, "line {v}");
                } else {
                    let _ = writeln!(s, "{k}={v}");
                }
            }
        }
        Format::Csv => {
            let _ = writeln!(s, "quantity,value");
            for (k, v) in rows {
                let _ = writeln!(s, "{k},{v}");
            }
        }
        Format::Markdown => {
            let _ = writeln!(s, "| quantity | value |\n|---|---|");
            for (k, v) in rows {
                let _ = writeln!(s, "| {k} | {v} |");
            }
        }
    }
    s
}

/// Text report of `rlab exponents --d d`.
pub fn exponents_report(d: usize) -> Result<String> {
    Ok(render(&exponents_table(d, None, None, None)?, Format::Text))
}

fn knapp_table(curve: &Curve, lambda: f64, t0: f64, c: Option<f64>, delta: Option<f64>) -> Result<Table> {
    let d = curve.d();
    let phase = PhaseSpec::graph(curve.clone(), true);
    let boxes: Vec<(f64, (f64, f64))> = match delta {
        Some(delta) => {
            let part = partition_family(&phase, delta, lambda)?;
            part.t.iter().cloned().zip(part.intervals.iter().cloned()).collect()
        }
        None => vec![(t0, (t0, t0 + lambda.powf(-default_rho(d))))],
    };
    let mut header = vec!["k".to_string(), "t_k".to_string()];
    header.extend((1..d).map(|i| format!("center_{i}")));
    header.extend((1..d).map(|i| format!("half_width_{i}")));
    header.extend(["volume".to_string(), "calibrated_c".to_string()]);
    let mut t = Table { header, rows: Vec::new() };
    for (k, (tk, iv)) in boxes.into_iter().enumerate() {
        let ck = match c {
            Some(c) => c,
            None => calibrate_c(&phase, tk, lambda, iv).map_err(|e| Error::Calibration(format!("box {}: {e}", k + 1)))?,
        };
        let bx = knapp_box(&phase, tk, lambda, ck)?;
        let mut row = vec![(k + 1).to_string(), num(tk)];
        row.extend(bx.center.iter().map(|v| num(*v)));
        row.extend(bx.half_widths.iter().map(|v| num(*v)));
        row.extend([num(bx.volume), num(ck)]);
        t.push(row);
    }
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
fn audit_table(
    kind: AuditKind,
    d: usize,
    alpha: Option<f64>,
    m_alpha: Option<f64>,
    normal: Option<&[f64]>,
    res: &[usize],
    ells: &[u32],
    samples: usize,
    seed: u64,
) -> Result<Table> {
    let mut t = Table::new(&["measure", "d", "alpha", "resolution", "ell", "nodes", "spacing", "c_hat"]);
    let name = format!("{kind:?}").to_lowercase();
    for &r in res {
        let base = match kind {
            AuditKind::Sphere => sphere_measure(d, r)?,
            AuditKind::Singular | AuditKind::Scaled => {
                let a = m_alpha.ok_or_else(|| Error::Config("--measure-alpha is required".into()))?;
                singular_alpha_measure(d, a, r)?
            }
            AuditKind::Hyperplane => {
                let n = normal.ok_or_else(|| Error::Config("--normal is required".into()))?;
                if n.len() != d {
                    return Err(Error::Config(format!("normal has {} entries but d = {d}", n.len())));
                }
                hyperplane_measure(n, 1.0, r)?
            }
        };
        let scales: &[u32] = if matches!(kind, AuditKind::Scaled) { ells } else { &[0] };
        for &l in scales {
            let mu = if matches!(kind, AuditKind::Scaled) {
                let a = TypeTuple::standard(d);
                let kap = f(kappa(&a, crate::rational::from_f64(base.alpha, 1_000_000))?);
                scaled_measure(&base, &a, l, kap)?
            } else {
                base.clone()
            };
            let al = alpha.unwrap_or(mu.alpha);
            let c_hat = dimension_audit(&mu, al, samples, seed)?;
            t.push(vec![name.clone(), d.to_string(), num(al), r.to_string(), l.to_string(), mu.len().to_string(), num(mu.spacing), num(c_hat)]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_formatting() {
        assert_eq!(line_text(Rational64::from_integer(2)), "1/p+2/q=1");
        assert_eq!(line_text(Rational64::new(5, 2)), "1/p+(5/2)/q=1");
    }

    #[test]
    fn report_for_the_plane() {
        let s = exponents_report(2).unwrap();
        assert!(s.contains("q_c=3\n") && s.contains("line 1/p+2/q=1\n"), "{s}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run(["rlab", "exponents", "--d", "2", "--bogus"]), 2);
    }
}
