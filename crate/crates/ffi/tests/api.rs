use std::f64::consts::PI;
use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rydberg_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    unsafe {
        rydberg_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn reference_params() -> RydbergParams {
    let mut c6 = 0.0;
    assert_eq!(unsafe { rydberg_convert_c6_au(1.7e19, &mut c6) }, RydbergStatus::Ok);
    rydberg_params_default(2.0 * PI * 210e3, c6)
}

#[test]
fn physics_entry_points() {
    let mut r = 0.0;
    assert_eq!(unsafe { rydberg_two_photon_rabi(2e8, 3e8, 1e9, &mut r) }, RydbergStatus::Ok);
    assert!((r - 2e8 * 3e8 / 2e9).abs() < 1e-6);
    assert_eq!(unsafe { rydberg_two_photon_rabi(2e8, 3e8, 0.0, &mut r) }, RydbergStatus::InvalidArgument);
    assert!(last_error().contains("delta"));

    let p = reference_params();
    let mut rb = 0.0;
    assert_eq!(unsafe { rydberg_blockade_radius_simple(&p, &mut rb) }, RydbergStatus::Ok);
    assert!(rb > 4e-6 && rb < 6e-6, "{rb}");
    let (mut rc, mut n) = (0.0, 0.0);
    let density = 1.0 / (4.0 * PI / 3.0 * rb.powi(3));
    assert_eq!(unsafe { rydberg_blockade_radius_collective(&p, density, &mut rc, &mut n) }, RydbergStatus::Ok);
    assert!((rc / rb - 1.0).abs() < 1e-12 && (n - 1.0).abs() < 1e-10);

    let bad = RydbergParams { omega0: -1.0, ..p };
    assert_eq!(unsafe { rydberg_blockade_radius_simple(&bad, &mut rb) }, RydbergStatus::InvalidArgument);
    assert!(last_error().contains("omega0"));
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { rydberg_convert_c6_au(1.0, ptr::null_mut()) }, RydbergStatus::NullPointer);
    assert!(last_error().contains("result"));
    assert_eq!(unsafe { rydberg_blockade_radius_simple(ptr::null(), &mut 0.0) }, RydbergStatus::NullPointer);
    unsafe {
        rydberg_exact_free(ptr::null_mut());
        rydberg_ensemble_free(ptr::null_mut());
    }
}

#[test]
fn ensemble_round_trip() {
    let p = reference_params();
    let sigma = [25e-6; 3];
    let mut e = ptr::null_mut();
    let status = unsafe { rydberg_ensemble_partition(1e6, sigma.as_ptr(), &p, RydbergModel::Collective, 1.0, &mut e) };
    assert_eq!(status, RydbergStatus::Ok);
    let (mut entries, mut count, mut covered) = (0usize, 0.0, 0.0);
    assert_eq!(unsafe { rydberg_ensemble_summary(e, &mut entries, &mut count, &mut covered) }, RydbergStatus::Ok);
    assert!(entries > 0 && count > 0.0 && covered <= 1e6 * (1.0 + 1e-9));
    let times: Vec<f64> = (0..101).map(|i| i as f64 * 0.2e-6).collect();
    let mut values = vec![0.0; times.len()];
    let status = unsafe { rydberg_ensemble_simulate(e, &p, times.as_ptr(), times.len(), values.as_mut_ptr()) };
    assert_eq!(status, RydbergStatus::Ok);
    assert_eq!(values[0], 0.0);
    let mut fit = RydbergFit::default();
    assert_eq!(
        unsafe { rydberg_fit_saturation(times.as_ptr(), values.as_ptr(), times.len(), &mut fit) },
        RydbergStatus::Ok
    );
    assert!(fit.converged && fit.n_sat > 0.0 && fit.n_sat < count);
    unsafe { rydberg_ensemble_free(e) };

    let status = unsafe { rydberg_ensemble_partition(1e6, sigma.as_ptr(), &p, RydbergModel::Simple, 1e12, &mut e) };
    assert_eq!(status, RydbergStatus::Ok);
    let status = unsafe { rydberg_ensemble_simulate(e, &p, times.as_ptr(), times.len(), values.as_mut_ptr()) };
    assert_eq!(status, RydbergStatus::EmptyEnsemble);
    unsafe { rydberg_ensemble_free(e) };
}

#[test]
fn fits() {
    let xs = [1.0, 2.0, 4.0];
    let ys = [2.0, 4.0, 8.0];
    let mut pl = RydbergPowerLaw::default();
    assert_eq!(unsafe { rydberg_fit_power_law(xs.as_ptr(), ys.as_ptr(), 3, &mut pl) }, RydbergStatus::Ok);
    assert!((pl.exponent - 1.0).abs() < 1e-12 && (pl.prefactor - 2.0).abs() < 1e-12);
    let flat = [3.0; 3];
    assert_eq!(unsafe { rydberg_fit_power_law(flat.as_ptr(), ys.as_ptr(), 3, &mut pl) }, RydbergStatus::InvalidArgument);

    let t: Vec<f64> = (0..41).map(|i| i as f64 * 0.25e-6).collect();
    let v: Vec<f64> = t.iter().map(|&t| -100.0 * (-5e7 * t / 100.0f64).exp_m1()).collect();
    let mut fit = RydbergFit::default();
    assert_eq!(unsafe { rydberg_fit_saturation(t.as_ptr(), v.as_ptr(), t.len(), &mut fit) }, RydbergStatus::Ok);
    assert!((fit.n_sat / 100.0 - 1.0).abs() < 1e-6 && (fit.rate / 5e7 - 1.0).abs() < 1e-6);
    let zeros = vec![0.0; t.len()];
    assert_eq!(
        unsafe { rydberg_fit_saturation(t.as_ptr(), zeros.as_ptr(), t.len(), &mut fit) },
        RydbergStatus::DegenerateData
    );
}

#[test]
fn exact_handles() {
    let p = reference_params();
    let pos = [0.0, 0.0, 0.0, 1e-6, 0.0, 0.0];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { rydberg_exact_new(pos.as_ptr(), 2, &p, false, 0.0, &mut h) }, RydbergStatus::Ok);
    let mut dim = 0;
    assert_eq!(unsafe { rydberg_exact_dim(h, &mut dim) }, RydbergStatus::Ok);
    assert_eq!(dim, 4);
    let t = [0.0, PI / (2f64.sqrt() * p.omega0)];
    let mut n = [0.0; 2];
    let mut w = [0.0; 2];
    assert_eq!(
        unsafe { rydberg_exact_evolve(h, t.as_ptr(), 2, n.as_mut_ptr(), w.as_mut_ptr()) },
        RydbergStatus::Ok
    );
    assert!(n[0].abs() < 1e-12 && (n[1] - 1.0).abs() < 1e-3 && w[1] > 0.99);
    assert_eq!(unsafe { rydberg_exact_evolve(h, t.as_ptr(), 2, n.as_mut_ptr(), ptr::null_mut()) }, RydbergStatus::Ok);
    unsafe { rydberg_exact_free(h) };

    let many: Vec<f64> = (0..45).map(|i| i as f64 * 1e-5).collect();
    assert_eq!(unsafe { rydberg_exact_new(many.as_ptr(), 15, &p, false, 0.0, &mut h) }, RydbergStatus::Size);
}

fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = lib_dir();
    assert!(dir.join("librydberg_ffi.so").exists() || dir.join("librydberg_ffi.dylib").exists());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-o")
        .arg(&exe)
        .arg("-L")
        .arg(&dir)
        .arg("-lrydberg_ffi")
        .arg("-lm")
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).env("LD_LIBRARY_PATH", &dir).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
