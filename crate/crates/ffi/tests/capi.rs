use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use windings_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::os::raw::c_char; 256];
    unsafe {
        windings_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn generate(alpha: f64, horizon: f64, seed: u64) -> *mut WindingsPath {
    let config = WindingsPathConfig { horizon, ..WindingsPathConfig::default() };
    let mut path = ptr::null_mut();
    let status = unsafe { windings_path_generate(alpha, &config, seed, &mut path) };
    assert_eq!(status, WindingsStatus::Ok, "{}", last_error());
    assert!(!path.is_null());
    path
}

fn series(path: *const WindingsPath, which: WindingsSeries) -> Vec<f64> {
    let mut len = 0;
    assert_eq!(unsafe { windings_path_len(path, &mut len) }, WindingsStatus::Ok);
    let mut values = vec![0.0; len];
    assert_eq!(unsafe { windings_path_copy(path, which, values.as_mut_ptr(), len) }, WindingsStatus::Ok);
    values
}

#[test]
fn constants_for_cauchy() {
    let mut c = WindingsConstants::default();
    assert_eq!(unsafe { windings_constants(1.0, &mut c) }, WindingsStatus::Ok);
    assert!((c.clock_mean - 1.0).abs() < 1e-10);
    assert!((c.spitzer_variance - c.rho_variance * c.clock_mean).abs() < 1e-8 * c.spitzer_variance);
}

#[test]
fn errors_map_to_codes_and_messages() {
    let mut c = WindingsConstants::default();
    let status = unsafe { windings_constants(2.5, &mut c) };
    assert_ne!(status, WindingsStatus::Ok);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { windings_constants(1.0, ptr::null_mut()) }, WindingsStatus::NullPointer);
    assert!(last_error().contains("null"));
    assert_eq!(unsafe { windings_path_len(ptr::null(), ptr::null_mut()) }, WindingsStatus::NullPointer);
}

#[test]
fn error_message_is_truncated_and_terminated() {
    unsafe { windings_constants(1.0, ptr::null_mut()) };
    let full = unsafe { windings_last_error_message(ptr::null_mut(), 0) };
    assert!(full > 4);
    let mut buf = [1 as std::os::raw::c_char; 4];
    let n = unsafe { windings_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, full);
    assert_eq!(buf[3], 0);
}

#[test]
fn integral_test_verdicts() {
    for (beta, expect) in [(0.0, 0), (1.0, 0), (3.0, 1)] {
        let mut converges = -1;
        assert_eq!(unsafe { windings_integral_test(1.2, beta, &mut converges) }, WindingsStatus::Ok);
        assert_eq!(converges, expect, "beta = {beta}");
    }
}

#[test]
fn angular_density_is_even_and_positive() {
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(windings_angular_density(1.5, 0.7, &mut a), WindingsStatus::Ok);
        assert_eq!(windings_angular_density(1.5, -0.7, &mut b), WindingsStatus::Ok);
    }
    assert!(a > 0.0);
    assert!((a - b).abs() < 1e-12 * a);
}

#[test]
fn path_handle_round_trip() {
    let path = generate(1.5, 1.0, 7);
    let times = series(path, WindingsSeries::Time);
    let clock = series(path, WindingsSeries::Clock);
    let theta = series(path, WindingsSeries::Theta);
    let (re, im) = (series(path, WindingsSeries::Re), series(path, WindingsSeries::Im));
    assert_eq!(times[0], 0.0);
    assert!((times[times.len() - 1] - 1.0).abs() < 1e-12);
    assert!(clock.windows(2).all(|w| w[1] > w[0]));
    assert_eq!((re[0], im[0], theta[0]), (1.0, 0.0, 0.0));

    let mut small = vec![0.0; times.len() - 1];
    let status = unsafe { windings_path_copy(path, WindingsSeries::Time, small.as_mut_ptr(), small.len()) };
    assert_eq!(status, WindingsStatus::BufferTooSmall);

    let mut exit = WindingsExit::default();
    assert_eq!(unsafe { windings_path_exit_time(path, 1e6, 1e6, &mut exit) }, WindingsStatus::Ok);
    assert_eq!(exit.censored, 1);
    assert_eq!(exit.time, times[times.len() - 1]);
    unsafe { windings_path_free(path) };
    unsafe { windings_path_free(ptr::null_mut()) };
}

#[test]
fn same_seed_same_path() {
    let (a, b) = (generate(0.8, 0.5, 11), generate(0.8, 0.5, 11));
    assert_eq!(series(a, WindingsSeries::Theta), series(b, WindingsSeries::Theta));
    unsafe {
        windings_path_free(a);
        windings_path_free(b);
    }
}

#[test]
fn rho_simulation() {
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { windings_rho_model_new(1.0, 1e-2, &mut model) }, WindingsStatus::Ok);
    let mut buf = vec![f64::NAN; 11];
    let status = unsafe { windings_rho_simulate(model, 1.0, 10, 3, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(status, WindingsStatus::Ok);
    assert_eq!(buf[0], 0.0);
    assert!(buf.iter().all(|v| v.is_finite()));
    let status = unsafe { windings_rho_simulate(model, 1.0, 20, 3, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(status, WindingsStatus::BufferTooSmall);
    unsafe { windings_rho_model_free(model) };
    let mut bad = ptr::null_mut();
    assert_ne!(unsafe { windings_rho_model_new(1.0, 0.0, &mut bad) }, WindingsStatus::Ok);
    assert!(bad.is_null());
}

const C_PROGRAM: &str = r#"
#include "windings.h"
int main(void) {
    WindingsConstants c;
    WindingsPathConfig cfg = {1.0, 0.0, 0.0, 0};
    WindingsPath *path = NULL;
    WindingsExit exit;
    size_t n = 0;
    double buf[4];
    char msg[64];
    if (windings_constants(1.0, &c) != WINDINGS_STATUS_OK) return 1;
    if (windings_path_generate(1.0, &cfg, 1, &path) != WINDINGS_STATUS_OK) return 2;
    windings_path_len(path, &n);
    windings_path_copy(path, WINDINGS_SERIES_THETA, buf, 4);
    windings_path_exit_time(path, 1.0, 1.0, &exit);
    windings_path_free(path);
    windings_last_error_message(msg, sizeof msg);
    return 0;
}
"#;

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let out = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
