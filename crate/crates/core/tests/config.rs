use rlab::config::{khintchine_config, sweep_config, Document};
use rlab::harness::{decay_sweep, FamilySpec, MeasureSpec};

const SWEEP: &str = "\
[curve]
curve = poly([[0,1],[0,0,1/2]])   # the parabola
[measure]
measure = hyperplane(normal=[0,1], extent=1/2, resolution=32)
[family]
family = random(delta=1/2, n_samples=4, seed=3)
[sweep]
lambda = 2^5, 2^6
q_list = 3, 4
p = 2
strict_resolution = false
";

#[test]
fn sweep_sections_parse() {
    let doc = Document::parse(SWEEP).unwrap();
    let (cfg, opts) = sweep_config(&doc).unwrap();
    assert_eq!(cfg.lambdas, vec![32.0, 64.0]);
    assert_eq!(cfg.q_list, vec![3.0, 4.0]);
    assert_eq!(cfg.p_list, vec![2.0]);
    assert_eq!(cfg.measure, MeasureSpec::Hyperplane { normal: vec![0.0, 1.0], extent: 0.5, resolution: 32 });
    assert_eq!(cfg.family, FamilySpec::Random { delta: 0.5, n_samples: 4, seed: 3 });
    assert!(opts.seed.is_none());
}

#[test]
fn sweep_csv_is_deterministic() {
    let doc = Document::parse(SWEEP).unwrap();
    let (cfg, _) = sweep_config(&doc).unwrap();
    let a = decay_sweep(&cfg).unwrap();
    let b = decay_sweep(&cfg).unwrap();
    assert_eq!(a.records_table().to_csv(), b.records_table().to_csv());
    assert_eq!(a.fits_table().to_csv(), b.fits_table().to_csv());
}

#[test]
fn single_lambda_has_no_slope() {
    let text = SWEEP.replace("lambda = 2^5, 2^6", "lambda = 2^5");
    let (cfg, _) = sweep_config(&Document::parse(&text).unwrap()).unwrap();
    assert!(decay_sweep(&cfg).is_err());
}

#[test]
fn small_lambda_rejected() {
    let text = SWEEP.replace("lambda = 2^5, 2^6", "lambda = 8, 2^6");
    assert!(sweep_config(&Document::parse(&text).unwrap()).is_err());
}

#[test]
fn unknown_keys_and_sections_rejected() {
    assert!(Document::parse("[plot]\nx = 1\n").is_err());
    let text = SWEEP.replace("p = 2", "p = 2\ncolour = red");
    let err = sweep_config(&Document::parse(&text).unwrap()).unwrap_err().to_string();
    assert!(err.contains("colour"), "{err}");
}

#[test]
fn khintchine_needs_random_family() {
    let doc = Document::parse(SWEEP).unwrap();
    assert!(khintchine_config(&doc).is_err());
    let text = SWEEP.replace("q_list = 3, 4", "q = 3").replace("p = 2", "p = 3");
    let (cfg, _) = khintchine_config(&Document::parse(&text).unwrap()).unwrap();
    assert_eq!((cfg.q, cfg.p, cfg.n_samples, cfg.seed), (3.0, 3.0, 4, 3));
}
