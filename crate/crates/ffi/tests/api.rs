use std::ffi::{CStr, CString};
use std::ptr;

use entire_dynamics_ffi::*;

fn function(json: &str) -> *mut EdFunction {
    let s = CString::new(json).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ed_function_from_json(s.as_ptr(), &mut f) }, EdStatus::Ok);
    f
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ed_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn evaluates_and_differentiates() {
    let f = function(r#"{"variant":"exp_affine","lambda":[0.5,0]}"#);
    let mut w = EdComplex { re: 0.0, im: 0.0 };
    unsafe {
        assert_eq!(ed_eval(f, EdComplex { re: 1.0, im: 0.0 }, &mut w), EdStatus::Ok);
        assert!((w.re - 0.5 * std::f64::consts::E).abs() < 1e-15);
        assert_eq!(ed_derivative(f, EdComplex { re: 0.0, im: 0.0 }, &mut w), EdStatus::Ok);
        assert!((w.re - 0.5).abs() < 1e-15);
        ed_function_free(f);
    }
}

#[test]
fn parse_errors_set_the_message() {
    let s = CString::new(r#"{"variant":"nope"}"#).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ed_function_from_json(s.as_ptr(), &mut f) }, EdStatus::Parse);
    assert!(f.is_null());
    assert!(last_error().contains("nope"));
    assert_eq!(unsafe { ed_function_from_json(ptr::null(), &mut f) }, EdStatus::NullPointer);
}

#[test]
fn null_outputs_are_rejected() {
    let f = function(r#"{"variant":"exp_affine","lambda":[1,0]}"#);
    unsafe {
        assert_eq!(ed_eval(f, EdComplex { re: 0.0, im: 0.0 }, ptr::null_mut()), EdStatus::NullPointer);
        assert_eq!(ed_eval(ptr::null(), EdComplex { re: 0.0, im: 0.0 }, ptr::null_mut()), EdStatus::NullPointer);
        ed_function_free(f);
        ed_function_free(ptr::null_mut());
    }
}

#[test]
fn towers_and_max_modulus() {
    let f = function(r#"{"variant":"exp_affine","lambda":[1,0]}"#);
    let mut t = [EdTower { depth: 0, base: 0.0 }; 4];
    let mut lm = 0.0;
    unsafe {
        assert_eq!(ed_iterated_max_modulus(f, 5.0, 4, t.as_mut_ptr()), EdStatus::Ok);
        assert_eq!(ed_log_max_modulus(f, 5.0, &mut lm), EdStatus::Ok);
        assert_eq!(ed_log_max_modulus(f, -1.0, &mut lm), EdStatus::InvalidArgument);
        ed_function_free(f);
    }
    assert!((lm - 5.0).abs() < 1e-12);
    assert_eq!(ed_tower_compare(t[1], t[2]), -1);
    assert_eq!(ed_tower_compare(t[3], t[3]), 0);
    assert_eq!(ed_tower_compare(EdTower { depth: 1, base: 3.0 }, EdTower { depth: 0, base: 3.0f64.exp() }), 0);
    let z2 = function(r#"{"variant":"polynomial","coefficients":[[0,0],[0,0],[1,0]]}"#);
    unsafe {
        assert_eq!(ed_iterated_max_modulus(z2, 0.5, 3, t.as_mut_ptr()), EdStatus::NonEscalating);
        ed_function_free(z2);
    }
}

#[test]
fn orbit_quantities() {
    let f = function(r#"{"variant":"exp_affine","lambda":[1,0]}"#);
    let (mut up, mut lo) = (0.0, 0.0);
    let (mut member, mut l) = (0, 0);
    unsafe {
        assert_eq!(ed_lyapunov(f, EdComplex { re: 0.318_131_505_204_764_1, im: 1.337_235_701_430_689 }, 32, &mut up, &mut lo), EdStatus::Ok);
        assert_eq!(ed_lyapunov(f, EdComplex { re: 0.0, im: 0.0 }, 2, &mut up, &mut lo), EdStatus::InvalidArgument);
        assert_eq!(ed_fast_escaping(f, EdComplex { re: 0.1, im: 0.0 }, 5.0, 5, 8, &mut member, &mut l), EdStatus::Ok);
        ed_function_free(f);
    }
    assert_eq!((member, l), (1, 3));
}

#[test]
fn measures() {
    let f = function(r#"{"variant":"polynomial","coefficients":[[0,0],[0,0],[1,0]]}"#);
    let u = EdRegion { kind: EdRegionKind::Disk, center: EdComplex { re: 0.0, im: 0.0 }, half_width: 0.0, half_height: 0.0, radius: 1e6 };
    let mut a = EdAreaResult { value: 0.0, log_value: 0.0, error_estimate: 0.0, converged: 0 };
    let mut mu = 0.0;
    let mut t = 0.0;
    let bad = EdGrid { base_resolution: 4, max_refinements: 2, rel_tol: 1e-3 };
    unsafe {
        assert_eq!(ed_spherical_area(f, &u, 1, ptr::null(), &mut a), EdStatus::Ok);
        assert_eq!(ed_mu_sup(f, &u, 1, ptr::null(), &mut mu), EdStatus::Ok);
        assert_eq!(ed_spherical_area(f, &u, 1, &bad, &mut a), EdStatus::InvalidArgument);
        ed_function_free(f);
    }
    assert!((a.value - 2.0).abs() < 1e-2 && a.converged == 1);
    // sup of 2|z|/(1+|z|⁴), attained on |z| = 3^{-1/4}; default grid tolerance 1e-3
    assert!((mu - (1.5 * 3f64.powf(-0.25)).ln()).abs() < 1e-3, "{mu}");
    let e = function(r#"{"variant":"exp_affine","lambda":[1,0]}"#);
    unsafe {
        assert_eq!(ed_nevanlinna_t(e, std::f64::consts::PI, &mut t), EdStatus::Ok);
        ed_function_free(e);
    }
    assert!((t - 1.0).abs() < 1e-6);
}

#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else { return };
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libentire_dynamics_ffi.a");
    if !lib.exists() {
        eprintln!("static library not found at {}; skipping", lib.display());
        return;
    }
    let dir = env!("CARGO_MANIFEST_DIR");
    let out = std::env::temp_dir().join(format!("ed-smoke-{}", std::process::id()));
    let status = std::process::Command::new(cc)
        .args([&format!("{dir}/tests/c/smoke.c"), "-I", &format!("{dir}/include"), "-o"])
        .arg(&out)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
    let _ = std::fs::remove_file(out);
}

fn which_cc() -> Result<&'static str, ()> {
    for c in ["cc", "gcc", "clang"] {
        if std::process::Command::new(c).arg("--version").output().is_ok() {
            return Ok(c);
        }
    }
    Err(())
}
