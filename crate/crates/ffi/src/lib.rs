//! C ABI for `windings-core`.
//!
//! Every function returns a [`WindingsStatus`]; results come back through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`windings_last_error_message`]. Objects are opaque handles released by
//! their `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use windings_core::experiments::{integral_test, BoundaryFamily, IntegralVerdict};
use windings_core::levy_angular::{angular_density, compute_constants, AngularLevyModel};
use windings_core::samplers::RngSeed;
use windings_core::stable_process::{exit_time, generate_path, ConeSpec, PathConfig, PlanarPath, StableIndex};
use windings_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindingsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Range = 3,
    Singularity = 4,
    DegenerateGeometry = 5,
    Precision = 6,
    Quadrature = 7,
    PathBudget = 8,
    Config = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

impl From<&Error> for WindingsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => WindingsStatus::Domain,
            Error::Singularity(_) => WindingsStatus::Singularity,
            Error::DegenerateGeometry(_) => WindingsStatus::DegenerateGeometry,
            Error::Range { .. } => WindingsStatus::Range,
            Error::Precision(_) => WindingsStatus::Precision,
            Error::Quadrature { .. } => WindingsStatus::Quadrature,
            Error::PathBudget { .. } => WindingsStatus::PathBudget,
            Error::Config(_) | Error::Json(_) => WindingsStatus::Config,
            Error::Io { .. } => WindingsStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), WindingsError>>(f: F) -> WindingsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WindingsStatus::Ok,
        Ok(Err(WindingsError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WindingsStatus::Panic
        }
    }
}

struct WindingsError(WindingsStatus, String);

impl From<Error> for WindingsError {
    fn from(e: Error) -> Self {
        WindingsError((&e).into(), e.to_string())
    }
}

fn null(name: &str) -> WindingsError {
    WindingsError(WindingsStatus::NullPointer, format!("{name} is null"))
}

/// Write `value` through `out`.
unsafe fn put<T>(out: *mut T, name: &str, value: T) -> Result<(), WindingsError> {
    if out.is_null() {
        return Err(null(name));
    }
    unsafe { out.write(value) };
    Ok(())
}

/// Copy `src` into the caller buffer `dst` of capacity `cap`.
unsafe fn copy_out(src: &[f64], dst: *mut f64, cap: usize) -> Result<(), WindingsError> {
    if dst.is_null() {
        return Err(null("buffer"));
    }
    if cap < src.len() {
        return Err(WindingsError(
            WindingsStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len()) };
    Ok(())
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes). Returns the full message length in bytes,
/// excluding the terminator; 0 when there is no message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn windings_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Per-index constants; field meanings as in the `constants` CSV.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WindingsConstants {
    pub alpha: f64,
    pub c_nu: f64,
    pub clock_mean: f64,
    pub winding_integral: f64,
    pub rho_variance: f64,
    pub spitzer_variance: f64,
    pub small_angle: f64,
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn windings_constants(alpha: f64, out: *mut WindingsConstants) -> WindingsStatus {
    guard(|| {
        let t = compute_constants(alpha)?;
        let value = WindingsConstants {
            alpha: t.alpha,
            c_nu: t.c_nu,
            clock_mean: t.clock_mean,
            winding_integral: t.winding_integral,
            rho_variance: t.rho_variance,
            spitzer_variance: t.spitzer_variance,
            small_angle: t.small_angle,
        };
        unsafe { put(out, "out", value) }
    })
}

/// Lévy density of the time-changed angle at `phi`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn windings_angular_density(alpha: f64, phi: f64, out: *mut f64) -> WindingsStatus {
    guard(|| {
        let v = angular_density(alpha, phi)?;
        unsafe { put(out, "out", v) }
    })
}

/// Integral test for the boundary `t^(1/α) (log t)^(β/α)`: writes 1 when
/// `∫_1^∞ f^(-α)` converges, 0 when it diverges.
///
/// # Safety
/// `converges` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn windings_integral_test(alpha: f64, beta: f64, converges: *mut i32) -> WindingsStatus {
    guard(|| {
        let verdict = integral_test(alpha, &BoundaryFamily::bertrand(beta)?)?;
        unsafe { put(converges, "converges", i32::from(verdict == IntegralVerdict::Converges)) }
    })
}

/// A sampled planar path.
pub struct WindingsPath(PlanarPath);

/// Path discretisation; zero fields take the library defaults (except
/// `horizon`).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WindingsPathConfig {
    pub horizon: f64,
    pub base_step: f64,
    pub angle_cap: f64,
    pub max_points: usize,
}

/// Sample a path of index `alpha` (2 for Brownian motion) started at 1.
///
/// # Safety
/// `config` must be null or point to a valid config; `out` must be null or
/// valid for writes. The handle written to `out` must be released with
/// [`windings_path_free`].
#[no_mangle]
pub unsafe extern "C" fn windings_path_generate(
    alpha: f64,
    config: *const WindingsPathConfig,
    seed: u64,
    out: *mut *mut WindingsPath,
) -> WindingsStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let c = unsafe { *config };
        let defaults = PathConfig::default();
        let pick = |v: f64, d: f64| if v == 0.0 { d } else { v };
        let cfg = PathConfig {
            horizon: c.horizon,
            base_step: pick(c.base_step, defaults.base_step.min(c.horizon)),
            angle_cap: pick(c.angle_cap, defaults.angle_cap),
            max_points: if c.max_points == 0 { defaults.max_points } else { c.max_points },
            ..defaults
        };
        let path = generate_path(StableIndex::new(alpha)?, &cfg, &mut RngSeed::new(seed).stream())?;
        unsafe { out.write(Box::into_raw(Box::new(WindingsPath(path)))) };
        Ok(())
    })
}

/// # Safety
/// `path` must be null or a handle from [`windings_path_generate`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn windings_path_free(path: *mut WindingsPath) {
    if !path.is_null() {
        drop(unsafe { Box::from_raw(path) });
    }
}

unsafe fn path_ref<'a>(path: *const WindingsPath) -> Result<&'a PlanarPath, WindingsError> {
    unsafe { path.as_ref() }.map(|p| &p.0).ok_or_else(|| null("path"))
}

/// Number of nodes of the path.
///
/// # Safety
/// `path` must be a live handle or null; `len` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn windings_path_len(path: *const WindingsPath, len: *mut usize) -> WindingsStatus {
    guard(|| {
        let p = unsafe { path_ref(path) }?;
        unsafe { put(len, "len", p.len()) }
    })
}

/// Which per-node series [`windings_path_copy`] returns.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindingsSeries {
    Time = 0,
    Re = 1,
    Im = 2,
    /// Winding around 0 since the start.
    Theta = 3,
    /// Clock `H` since the start.
    Clock = 4,
}

/// Copy one per-node series into `buf`, which must hold `windings_path_len`
/// values.
///
/// # Safety
/// `path` must be a live handle or null; `buf` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn windings_path_copy(
    path: *const WindingsPath,
    series: WindingsSeries,
    buf: *mut f64,
    cap: usize,
) -> WindingsStatus {
    guard(|| {
        let p = unsafe { path_ref(path) }?;
        let values: Vec<f64> = match series {
            WindingsSeries::Time => p.times().to_vec(),
            WindingsSeries::Re => p.points().iter().map(|z| z.re).collect(),
            WindingsSeries::Im => p.points().iter().map(|z| z.im).collect(),
            WindingsSeries::Theta => p.theta(),
            WindingsSeries::Clock => p.clock(),
        };
        unsafe { copy_out(&values, buf, cap) }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WindingsExit {
    /// Interpolated exit time; the last time when censored.
    pub time: f64,
    /// 1 when the winding never left the cone.
    pub censored: i32,
}

/// First exit of the path's winding from `(-lower, upper)`.
///
/// # Safety
/// `path` must be a live handle or null; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn windings_path_exit_time(
    path: *const WindingsPath,
    lower: f64,
    upper: f64,
    out: *mut WindingsExit,
) -> WindingsStatus {
    guard(|| {
        let p = unsafe { path_ref(path) }?;
        let record = exit_time(p.times(), &p.theta(), &ConeSpec::two_sided(lower, upper)?)?;
        unsafe { put(out, "out", WindingsExit { time: record.time, censored: i32::from(record.censored) }) }
    })
}

/// Direct simulator of the time-changed angle `ρ`.
pub struct WindingsRhoModel(AngularLevyModel);

/// Build the simulator for index `alpha` with small-jump cutoff `epsilon`.
///
/// # Safety
/// `out` must be null or valid for writes; release the handle with
/// [`windings_rho_model_free`].
#[no_mangle]
pub unsafe extern "C" fn windings_rho_model_new(
    alpha: f64,
    epsilon: f64,
    out: *mut *mut WindingsRhoModel,
) -> WindingsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = AngularLevyModel::new(alpha, epsilon)?;
        unsafe { out.write(Box::into_raw(Box::new(WindingsRhoModel(model)))) };
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn windings_rho_model_free(model: *mut WindingsRhoModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// `ρ` at `0, horizon/steps, ..., horizon` into `buf` (`steps + 1` values).
///
/// # Safety
/// `model` must be a live handle or null; `buf` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn windings_rho_simulate(
    model: *const WindingsRhoModel,
    horizon: f64,
    steps: usize,
    seed: u64,
    buf: *mut f64,
    cap: usize,
) -> WindingsStatus {
    guard(|| {
        let m = unsafe { model.as_ref() }.ok_or_else(|| null("model"))?;
        let values = m.0.simulate_rho(horizon, steps, &mut RngSeed::new(seed).stream())?;
        unsafe { copy_out(&values, buf, cap) }
    })
}
