use std::process::{Command, Output};

fn rlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlab")).args(args).env_remove("RLAB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exponents_for_the_plane() {
    let o = rlab(&["exponents", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("q_c=3\n") && s.contains("line 1/p+2/q=1\n"), "{s}");
}

#[test]
fn exponents_csv_lists_kdim_thresholds() {
    let o = rlab(&["exponents", "--d", "4", "--format", "csv"]);
    let s = stdout(&o);
    assert!(s.starts_with("quantity,value\n"));
    assert!(s.contains("kdim_threshold_k2,8\n"), "{s}");
}

#[test]
fn hyperplane_first_axis() {
    let o = rlab(&["hyperplane", "--d", "3", "--normal", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("omega=2\n"));
}

#[test]
fn missing_config_is_exit_two() {
    let o = rlab(&["sweep", "--config", "/definitely/not/here.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn unknown_flag_prints_usage() {
    let o = rlab(&["exponents", "--d", "2", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cfg");
    std::fs::write(&p, "[curve]\ncurve = moment(2)\n[measure]\nmeasure = sphere()\n[family]\nfamily = bump()\n[sweep]\nlambda = 2^6, x\nq_list = 3\n").unwrap();
    let o = rlab(&["sweep", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 8"));
}

#[test]
fn degenerate_curve_is_numerical_failure() {
    let o = rlab(&["exponents", "--d", "2", "--curve", "poly([[0,1],[0,2]])"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn knapp_rows_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("boxes.csv");
    let o = rlab(&["knapp", "--d", "2", "--lambda", "4096", "--delta", "1/2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = std::fs::read_to_string(&out).unwrap();
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "k,t_k,center_1,half_width_1,volume,calibrated_c");
    assert_eq!(lines.count(), 4);
}

#[test]
fn sweep_writes_records_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    std::fs::write(
        &cfg,
        "# bump sweep\n[curve]\ncurve = moment(2)\n[measure]\nmeasure = sphere(resolution=64)\n[family]\nfamily = bump(eps0=1/2)\n[sweep]\nlambda = 64, 128, 256\nq_list = 4\np = inf\n",
    )
    .unwrap();
    let out = dir.path().join("run.csv");
    let o = rlab(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 4);
    let fits = std::fs::read_to_string(dir.path().join("run.fits.csv")).unwrap();
    assert!(fits.starts_with("p,q,decay_slope"));
}

#[test]
fn seeded_random_lower_is_reproducible() {
    let args = ["random-lower", "--lambda", "2^8,2^9", "--samples", "32", "--seed", "11"];
    let a = rlab(&args);
    let b = rlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn audit_reports_a_row_per_resolution() {
    let o = rlab(&["audit-measure", "--measure", "sphere", "--d", "2", "--resolution", "64,128"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}
