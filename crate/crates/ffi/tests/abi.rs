use rlab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rlab_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn curve_round_trip() {
    let mut c: *mut RlabCurve = ptr::null_mut();
    assert_eq!(unsafe { rlab_curve_moment(3, &mut c) }, RlabStatus::Ok);
    assert_eq!(unsafe { rlab_curve_dim(c) }, 3);
    let mut tau = 0.0;
    assert_eq!(unsafe { rlab_curve_torsion(c, 0.3, &mut tau) }, RlabStatus::Ok);
    assert!((tau - 1.0).abs() < 1e-12);
    unsafe { rlab_curve_free(c) };
}

#[test]
fn parse_errors_set_message() {
    let spec = CString::new("spiral(3)").unwrap();
    let mut c: *mut RlabCurve = ptr::null_mut();
    assert_eq!(unsafe { rlab_curve_parse(spec.as_ptr(), &mut c) }, RlabStatus::Config);
    assert!(c.is_null());
    assert!(last_error().contains("spiral"));
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { rlab_curve_moment(2, ptr::null_mut()) }, RlabStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { rlab_curve_torsion(ptr::null(), 0.0, &mut v) }, RlabStatus::NullPointer);
    assert_eq!(unsafe { rlab_curve_dim(ptr::null()) }, 0);
    unsafe { rlab_curve_free(ptr::null_mut()) };
}

#[test]
fn zero_frequency_gives_the_interval_length() {
    let mut c: *mut RlabCurve = ptr::null_mut();
    unsafe { rlab_curve_moment(2, &mut c) };
    let x = [0.4, -0.2];
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { rlab_extension_eval(c, 0.0, 0.25, 0.75, x.as_ptr(), 2, &mut re, &mut im) }, RlabStatus::Ok);
    assert!((re - 0.5).abs() < 1e-14 && im.abs() < 1e-14);
    assert_eq!(unsafe { rlab_extension_eval(c, 1.0, 0.0, 1.0, x.as_ptr(), 3, &mut re, &mut im) }, RlabStatus::InvalidArgument);
    unsafe { rlab_curve_free(c) };
}

#[test]
fn lq_norm_on_the_circle() {
    let mut c: *mut RlabCurve = ptr::null_mut();
    let mut m: *mut RlabMeasure = ptr::null_mut();
    unsafe {
        rlab_curve_moment(2, &mut c);
        assert_eq!(rlab_measure_sphere(2, 128, &mut m), RlabStatus::Ok);
    }
    assert_eq!(unsafe { rlab_measure_len(m) }, 128);
    let mut mass = 0.0;
    unsafe { rlab_measure_mass(m, &mut mass) };
    assert!((mass - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    // lambda = 0: |T f| = 1 everywhere, so the L^2 norm is sqrt(2 pi)
    let mut n = 0.0;
    assert_eq!(unsafe { rlab_extension_lq_norm(c, m, 0.0, 0.0, 1.0, 2.0, &mut n) }, RlabStatus::Ok);
    assert!((n - mass.sqrt()).abs() < 1e-12);
    let mut m3: *mut RlabMeasure = ptr::null_mut();
    unsafe { rlab_measure_sphere(3, 8, &mut m3) };
    assert_eq!(unsafe { rlab_extension_lq_norm(c, m3, 1.0, 0.0, 1.0, 2.0, &mut n) }, RlabStatus::InvalidArgument);
    unsafe {
        rlab_measure_free(m3);
        rlab_measure_free(m);
        rlab_curve_free(c);
    }
}

#[test]
fn exponents_and_omega() {
    let (mut q, mut l) = (RlabRational { num: 0, den: 1 }, RlabRational { num: 0, den: 1 });
    assert_eq!(unsafe { rlab_exponents_sphere(2, &mut q, &mut l) }, RlabStatus::Ok);
    assert_eq!((q, l), (RlabRational { num: 3, den: 1 }, RlabRational { num: 2, den: 1 }));
    let num = [1i64, 0, 0];
    let den = [1i64, 1, 1];
    let mut w = 9u32;
    assert_eq!(unsafe { rlab_hyperplane_omega(num.as_ptr(), den.as_ptr(), 3, &mut w) }, RlabStatus::Ok);
    assert_eq!(w, 2);
    let zero_den = [1i64, 0, 1];
    assert_eq!(unsafe { rlab_hyperplane_omega(num.as_ptr(), zero_den.as_ptr(), 3, &mut w) }, RlabStatus::InvalidArgument);
}

#[test]
fn audit_of_the_circle_is_moderate() {
    let mut m: *mut RlabMeasure = ptr::null_mut();
    unsafe { rlab_measure_sphere(2, 512, &mut m) };
    let mut c = 0.0;
    assert_eq!(unsafe { rlab_dimension_audit(m, 1.0, 500, 1, &mut c) }, RlabStatus::Ok);
    assert!(c > 1.0 && c < 5.0, "{c}");
    unsafe { rlab_measure_free(m) };
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rlab.h")).unwrap();
    for name in [
        "rlab_last_error",
        "rlab_curve_moment",
        "rlab_curve_parse",
        "rlab_curve_free",
        "rlab_measure_sphere",
        "rlab_measure_hyperplane",
        "rlab_extension_eval",
        "rlab_extension_lq_norm",
        "rlab_exponents_sphere",
        "rlab_hyperplane_omega",
        "rlab_dimension_audit",
    ] {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"rlab.h\"\nint main(void) { RlabCurve *c = 0; RlabStatus s = rlab_curve_moment(2, &c); rlab_curve_free(c); return s == RLAB_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
