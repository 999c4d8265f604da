//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! ```text
//! [curve]
//! curve = moment(2)
//! [measure]
//! measure = sphere(resolution=256)
//! [family]
//! family = bump(x0=[0,1], eps0=1/2)
//! [sweep]
//! lambda = 2^6, 2^7, 2^8
//! q_list = 3, 4
//! p = inf
//! ```
//!
//! `#` starts a comment. Numbers accept decimals, fractions `a/b`, powers `2^k` and `inf`.

use crate::curve::Curve;
use crate::harness::{FamilySpec, KhintchineConfig, MeasureSpec, SweepConfig};
use crate::rational::{parse_rational, to_f64};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

const SECTIONS: [&str; 4] = ["curve", "measure", "family", "sweep"];

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// Parsed file: section name to key to entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            if let Some(name) = s.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {line}: unterminated section header")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(Error::Config(format!("line {line}: unknown section [{name}]")));
                }
                doc.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value'")))?;
            let sec = current
                .as_ref()
                .ok_or_else(|| Error::Config(format!("line {line}: key outside any section")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Config(format!("line {line}: empty key")));
            }
            let map = doc.sections.get_mut(sec).expect("section exists");
            if map.contains_key(k) {
                return Err(Error::Config(format!("line {line}: duplicate key '{k}' in [{sec}]")));
            }
            map.insert(k.to_string(), Entry { value: v.trim().to_string(), line });
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Document::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|m| m.get(key))
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<()> {
        if let Some(m) = self.sections.get(section) {
            for (k, e) in m {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::Config(format!("line {}: unknown key '{k}' in [{section}]", e.line)));
                }
            }
        }
        Ok(())
    }

    fn require(&self, section: &str, key: &str) -> Result<&Entry> {
        self.get(section, key).ok_or_else(|| Error::Config(format!("missing '{key}' in [{section}]")))
    }
}

fn at<T>(e: &Entry, r: Result<T>) -> Result<T> {
    r.map_err(|err| match err {
        Error::Config(m) => Error::Config(format!("line {}: {m}", e.line)),
        other => Error::Config(format!("line {}: {other}", e.line)),
    })
}

/// Real number: `inf`, `a/b`, `2^k`, or a decimal.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    match s {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        _ => {}
    }
    if let Some((b, e)) = s.split_once('^') {
        let b = parse_rational(b)?;
        let e: i32 = e.trim().parse().map_err(|_| Error::Config(format!("bad exponent in '{s}'")))?;
        return Ok(to_f64(b).powi(e));
    }
    parse_rational(s).map(to_f64)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Config(format!("expected a non-negative integer, got '{s}'")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("expected true or false, got '{other}'"))),
    }
}

/// Split on commas at bracket depth zero.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

/// Comma-separated reals, optionally in brackets.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let s = s.strip_prefix('[').and_then(|v| v.strip_suffix(']')).unwrap_or(s);
    let items = split_top(s);
    if items.is_empty() || items.iter().any(|v| v.is_empty()) {
        return Err(Error::Config(format!("bad list '{s}'")));
    }
    items.into_iter().map(parse_real).collect()
}

/// `name(k1=v1, k2=[..])` into the name and its keyword arguments.
pub fn parse_call(s: &str) -> Result<(String, BTreeMap<String, String>)> {
    let s = s.trim();
    let (name, rest) = match s.split_once('(') {
        Some((n, r)) => (n.trim(), r.strip_suffix(')').ok_or_else(|| Error::Config(format!("unbalanced parentheses in '{s}'")))?),
        None => (s, ""),
    };
    let mut args = BTreeMap::new();
    for item in split_top(rest) {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got '{item}'")))?;
        if args.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("duplicate argument '{}'", k.trim())));
        }
    }
    Ok((name.to_string(), args))
}

fn check_args(name: &str, args: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    for k in args.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown argument '{k}' for {name}")));
        }
    }
    Ok(())
}

fn arg_real(args: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    args.get(key).map(|v| parse_real(v)).transpose()
}

fn arg_usize(args: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>> {
    args.get(key).map(|v| parse_usize(v)).transpose()
}

fn need<T>(v: Option<T>, name: &str, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("{name} needs '{key}'")))
}

pub fn parse_measure(s: &str) -> Result<MeasureSpec> {
    let (name, args) = parse_call(s)?;
    match name.as_str() {
        "sphere" => {
            check_args(&name, &args, &["resolution"])?;
            Ok(MeasureSpec::Sphere { resolution: arg_usize(&args, "resolution")?.unwrap_or(64) })
        }
        "singular" => {
            check_args(&name, &args, &["alpha", "resolution"])?;
            Ok(MeasureSpec::Singular {
                alpha: need(arg_real(&args, "alpha")?, &name, "alpha")?,
                resolution: arg_usize(&args, "resolution")?.unwrap_or(64),
            })
        }
        "hyperplane" => {
            check_args(&name, &args, &["normal", "extent", "resolution"])?;
            Ok(MeasureSpec::Hyperplane {
                normal: parse_list(need(args.get("normal"), &name, "normal")?)?,
                extent: arg_real(&args, "extent")?.unwrap_or(1.0),
                resolution: arg_usize(&args, "resolution")?.unwrap_or(64),
            })
        }
        "knapp_box" => {
            check_args(&name, &args, &["per_axis"])?;
            Ok(MeasureSpec::KnappBox { per_axis: arg_usize(&args, "per_axis")?.unwrap_or(32) })
        }
        other => Err(Error::Config(format!("unknown measure '{other}'"))),
    }
}

pub fn parse_family(s: &str, d: usize) -> Result<FamilySpec> {
    let (name, args) = parse_call(s)?;
    match name.as_str() {
        "knapp" => {
            check_args(&name, &args, &["rho", "t0", "c"])?;
            Ok(FamilySpec::Knapp {
                rho: arg_real(&args, "rho")?,
                t0: arg_real(&args, "t0")?.unwrap_or(0.0),
                c: arg_real(&args, "c")?.unwrap_or(0.5),
            })
        }
        "bump" => {
            check_args(&name, &args, &["x0", "eps0"])?;
            let x0 = match args.get("x0") {
                Some(v) => parse_list(v)?,
                None => {
                    let mut e = vec![0.0; d];
                    e[d - 1] = 1.0;
                    e
                }
            };
            if x0.len() != d {
                return Err(Error::Config(format!("x0 has {} entries but d = {d}", x0.len())));
            }
            Ok(FamilySpec::Bump { x0, eps0: arg_real(&args, "eps0")?.unwrap_or(0.5) })
        }
        "random" => {
            check_args(&name, &args, &["delta", "n_samples", "seed"])?;
            Ok(FamilySpec::Random {
                delta: need(arg_real(&args, "delta")?, &name, "delta")?,
                n_samples: arg_usize(&args, "n_samples")?.unwrap_or(64),
                seed: arg_usize(&args, "seed")?.unwrap_or(0) as u64,
            })
        }
        other => Err(Error::Config(format!("unknown family '{other}'"))),
    }
}

/// Settings of `[sweep]` that are not part of the experiment itself.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn curve_of(doc: &Document) -> Result<Curve> {
    doc.check_keys("curve", &["curve"])?;
    let e = doc.require("curve", "curve")?;
    at(e, Curve::parse(&e.value))
}

struct SweepKeys {
    lambdas: Vec<f64>,
    q_list: Vec<f64>,
    p_list: Vec<f64>,
    strict: bool,
    opts: RunOptions,
}

fn sweep_common(doc: &Document) -> Result<SweepKeys> {
    doc.check_keys("sweep", &["lambda", "q_list", "q", "p", "lorentz", "strict_resolution", "seed", "out"])?;
    let e = doc.require("sweep", "lambda")?;
    let lambdas = at(e, parse_list(&e.value))?;
    let q_list = match (doc.get("sweep", "q_list"), doc.get("sweep", "q")) {
        (Some(_), Some(e)) => return Err(Error::Config(format!("line {}: give either q or q_list", e.line))),
        (Some(e), None) | (None, Some(e)) => at(e, parse_list(&e.value))?,
        (None, None) => return Err(Error::Config("missing 'q_list' in [sweep]".into())),
    };
    let p_list = match doc.get("sweep", "p") {
        Some(e) => at(e, parse_list(&e.value))?,
        None => q_list.clone(),
    };
    let strict = match doc.get("sweep", "strict_resolution") {
        Some(e) => at(e, parse_bool(&e.value))?,
        None => false,
    };
    let seed = doc.get("sweep", "seed").map(|e| at(e, parse_usize(&e.value).map(|v| v as u64))).transpose()?;
    let out = doc.get("sweep", "out").map(|e| PathBuf::from(&e.value));
    Ok(SweepKeys { lambdas, q_list, p_list, strict, opts: RunOptions { seed, out } })
}

/// Sweep configuration from all four sections.
pub fn sweep_config(doc: &Document) -> Result<(SweepConfig, RunOptions)> {
    let curve = curve_of(doc)?;
    doc.check_keys("measure", &["measure"])?;
    doc.check_keys("family", &["family"])?;
    let e = doc.require("measure", "measure")?;
    let measure = at(e, parse_measure(&e.value))?;
    let e = doc.require("family", "family")?;
    let mut family = at(e, parse_family(&e.value, curve.d()))?;
    let SweepKeys { lambdas, q_list, p_list, strict, opts } = sweep_common(doc)?;
    let lorentz = match doc.get("sweep", "lorentz") {
        Some(e) => at(e, parse_bool(&e.value))?,
        None => false,
    };
    if let (FamilySpec::Random { seed, .. }, Some(s)) = (&mut family, opts.seed) {
        *seed = s;
    }
    let cfg = SweepConfig { curve, measure, family, lambdas, q_list, p_list, lorentz, strict };
    cfg.validate()?;
    Ok((cfg, opts))
}

/// Randomized lower-bound configuration: `[curve]`, a `random(..)` family and `[sweep]` with one `q`.
pub fn khintchine_config(doc: &Document) -> Result<(KhintchineConfig, RunOptions)> {
    let curve = curve_of(doc)?;
    doc.check_keys("family", &["family"])?;
    let e = doc.require("family", "family")?;
    let (delta, n_samples, seed) = match at(e, parse_family(&e.value, curve.d()))? {
        FamilySpec::Random { delta, n_samples, seed } => (delta, n_samples, seed),
        _ => return Err(Error::Config(format!("line {}: the randomized lower bound needs the random family", e.line))),
    };
    let SweepKeys { lambdas, q_list, p_list, strict, opts } = sweep_common(doc)?;
    if q_list.len() != 1 || p_list.len() != 1 {
        return Err(Error::Config("the randomized lower bound takes a single q and p".into()));
    }
    let mut cfg = KhintchineConfig::new(curve, delta, q_list[0], lambdas);
    cfg.p = p_list[0];
    cfg.n_samples = n_samples;
    cfg.seed = opts.seed.unwrap_or(seed);
    cfg.strict = strict;
    Ok((cfg, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_real("1/4").unwrap(), 0.25);
        assert_eq!(parse_real("2^6").unwrap(), 64.0);
        assert_eq!(parse_real("inf").unwrap(), f64::INFINITY);
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn calls_with_lists() {
        let (n, a) = parse_call("hyperplane(normal=[1,0,0], extent=1/2)").unwrap();
        assert_eq!(n, "hyperplane");
        assert_eq!(a["normal"], "[1,0,0]");
        assert_eq!(parse_list(&a["normal"]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Document::parse("[sweep]\nlambda 64\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let doc = Document::parse("[curve]\ncurve = moment(2)\n\n[measure]\nmeasure = cube(resolution=3)\n").unwrap();
        let err = sweep_config(&doc).unwrap_err().to_string();
        assert!(err.contains("line 5"), "{err}");
    }
}
