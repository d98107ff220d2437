//! Lévy measure of the planar process and of the time-changed angle.
//!
//! The planar process has Lévy measure `ν(dx) = C_ν |x|^(-2-α) dx` with
//! `C_ν = α 2^(α-1) Γ(1+α/2) / (π Γ(1-α/2))`. The angle `ρ_u = θ_{A(u)}` is
//! a symmetric Lévy process whose Lévy measure is the image of `ν` under
//! `z ↦ arg(1+z)`; its density is
//!
//! ```text
//! π̃(φ) = C_ν ∫_0^∞ r dr / ((r - cos φ)² + sin² φ)^(1+α/2),   0 < |φ| <= π,
//! ```
//!
//! and `π̃(φ) ~ L̃ |φ|^(-1-α)` as `φ → 0`.

mod model;

pub use model::AngularLevyModel;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_power_origin, integrate_power_tail, integrate_with_breaks, Tolerance};
use crate::stable_process::ComplexPoint;
use crate::stats::special::gamma_unchecked as gamma;

/// Indices closer than this to 2 are refused by [`compute_constants`].
pub const MIN_DISTANCE_FROM_TWO: f64 = 1e-6;

/// Angle at which `φ^(1+α) π̃(φ)` is evaluated to obtain `L̃`.
const SMALL_ANGLE: f64 = 1e-6;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("planar stable index must lie in (0, 2), got {alpha}")));
    }
    Ok(())
}

/// Prefactor `C_ν` of the Lévy measure of the planar process.
pub fn c_nu(alpha: f64) -> f64 {
    alpha * 2f64.powf(alpha - 1.0) * gamma(1.0 + alpha / 2.0) / (PI * gamma(1.0 - alpha / 2.0))
}

/// `K(α) = E|Z_1|^(-α) = 2^(-α) Γ(1-α/2) / Γ(1+α/2)` for `Z` started at 0.
pub fn clock_mean(alpha: f64) -> f64 {
    2f64.powf(-alpha) * gamma(1.0 - alpha / 2.0) / gamma(1.0 + alpha / 2.0)
}

/// Density of `ν` at `x`.
pub fn density_nu(alpha: f64, x: ComplexPoint) -> Result<f64> {
    check_alpha(alpha)?;
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::Singularity("Lévy density is singular at the origin".into()));
    }
    Ok(c_nu(alpha) * r.powf(-2.0 - alpha))
}

/// Scale `σ` of the symmetric stable law with Lévy density
/// `L̃ |x|^(-1-α)`, i.e. characteristic function `exp(-σ^α |u|^α)`.
pub fn stable_scale_from_tail(alpha: f64, l_tilde: f64) -> f64 {
    // ∫_0^∞ (1 - cos x) x^(-1-α) dx
    let kernel = if alpha == 1.0 {
        PI / 2.0
    } else if alpha < 1.0 {
        gamma(1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
    } else {
        gamma(2.0 - alpha) / (1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
    };
    (2.0 * l_tilde * kernel).powf(1.0 / alpha)
}

/// The density `π̃` together with its quadrature tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularDensity {
    alpha: f64,
    c_nu: f64,
    rel_tol: f64,
}

impl AngularDensity {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(AngularDensity { alpha, c_nu: c_nu(alpha), rel_tol: 1e-8 })
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `π̃(φ)` by adaptive quadrature of the radial integral. Zero for
    /// `|φ| > π`.
    pub fn density(&self, phi: f64) -> Result<f64> {
        let phi = phi.abs();
        if phi == 0.0 {
            return Err(Error::Singularity("angular density is singular at 0".into()));
        }
        if phi.is_nan() {
            return Err(Error::domain("angle is NaN"));
        }
        if phi > PI {
            return Ok(0.0);
        }
        let (s, c) = phi.sin_cos();
        let s = s.abs();
        let p = 1.0 + self.alpha / 2.0;
        // In x = r - cos φ the peak sits at 0 with width sin φ.
        let f = |x: f64| (c + x) * (x * x + s * s).powf(-p);

        // Geometric breaks s·10^j on both sides, so no first-pass segment has
        // the peak just beyond its nodes.
        let reach = (2.0 - c).max(100.0 * s);
        let mut scales = Vec::new();
        let mut w = s;
        while w < reach {
            scales.push(w);
            w *= 10.0;
        }
        let mut breaks = vec![-c];
        if c > 0.0 {
            breaks.extend(scales.iter().rev().map(|w| -w).filter(|&b| b > -c));
            breaks.push(0.0);
        }
        breaks.extend(scales.iter().copied().filter(|&b| b > -c));
        breaks.push(reach);
        breaks.dedup();
        let tol = Tolerance::relative(self.rel_tol);
        let body = integrate_with_breaks(f, &breaks, tol)?;
        let tail = integrate_power_tail(|r| f(r - c), reach + c, self.alpha, tol)?;
        Ok(self.c_nu * (body.value + tail.value))
    }

    /// `π̃(φ)` from the reduced form
    /// `C_ν [1/α + cos φ sin(φ)^(-1-α) ∫_0^(π-|φ|) sin(v)^α dv]`.
    pub fn density_reduced(&self, phi: f64) -> Result<f64> {
        let phi = phi.abs();
        if phi == 0.0 {
            return Err(Error::Singularity("angular density is singular at 0".into()));
        }
        if phi > PI {
            return Ok(0.0);
        }
        let a = self.alpha;
        if phi == PI {
            return Ok(self.c_nu / (a * (1.0 + a)));
        }
        let (s, c) = phi.sin_cos();
        let upper = PI - phi;
        // sin(v)^α ~ v^α near 0
        let inner = integrate_power_origin(|v| v.sin().powf(a), upper, 1.0 + a, Tolerance::relative(1e-13))?.value;
        Ok(self.c_nu * (1.0 / a + c * s.powf(-1.0 - a) * inner))
    }

    /// `∫_{-π}^{π} φ² π̃(φ) dφ`.
    pub fn second_moment(&self) -> Result<f64> {
        Ok(2.0 * self.truncated_second_moment(PI)?)
    }

    /// `∫_0^x φ² π̃(φ) dφ` for `0 < x <= π`.
    pub fn truncated_second_moment(&self, x: f64) -> Result<f64> {
        let x = x.min(PI);
        if !(x > 0.0) {
            return Ok(0.0);
        }
        let tol = Tolerance::relative((self.rel_tol * 10.0).max(1e-7));
        let mut failure = None;
        let est = integrate_power_origin(
            |phi| phi * phi * self.density_or_record(phi, &mut failure),
            x,
            2.0 - self.alpha,
            tol,
        )?;
        failure.map_or(Ok(est.value), Err)
    }

    /// `∫_x^π π̃(φ) dφ`, zero for `x >= π`.
    pub fn tail_mass(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("tail mass needs x > 0, got {x}")));
        }
        if x >= PI {
            return Ok(0.0);
        }
        let tol = Tolerance::relative((self.rel_tol * 10.0).max(1e-7));
        let a = self.alpha;
        let mut failure = None;
        // t = φ^(-α) turns the integrand into φ^(1+α) π̃(φ) / α, which tends to L̃ / α.
        let (t0, t1) = (PI.powf(-a), x.powf(-a));
        let mut breaks: Vec<f64> = (0..).map(|j| t0 * 10f64.powi(j)).take_while(|&t| t < t1).collect();
        breaks.push(t1);
        let est = integrate_with_breaks(
            |t| {
                let phi = t.powf(-1.0 / a);
                phi.powf(1.0 + a) * self.density_or_record(phi, &mut failure) / a
            },
            &breaks,
            tol,
        )?;
        failure.map_or(Ok(est.value), Err)
    }

    /// `L̃ = lim φ^(1+α) π̃(φ)`, evaluated at a very small angle.
    pub fn small_angle_limit(&self) -> Result<f64> {
        Ok(SMALL_ANGLE.powf(1.0 + self.alpha) * self.density(SMALL_ANGLE)?)
    }

    fn density_or_record(&self, phi: f64, failure: &mut Option<Error>) -> f64 {
        match self.density(phi) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    }
}

/// `π̃(φ)` at the default tolerance.
pub fn angular_density(alpha: f64, phi: f64) -> Result<f64> {
    AngularDensity::new(alpha)?.density(phi)
}

/// `Ψ(u) = ∫ (1 - cos uφ) π̃(φ) dφ`, the exponent of `ρ`.
pub fn characteristic_exponent(alpha: f64, u: f64) -> Result<f64> {
    let d = AngularDensity::new(alpha)?;
    if !u.is_finite() {
        return Err(Error::domain("characteristic exponent needs finite u"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    let est = integrate_power_origin(
        |phi| {
            let s = (0.5 * u * phi).sin();
            2.0 * s * s * d.density_or_record(phi, &mut failure)
        },
        PI,
        2.0 - alpha,
        Tolerance::relative(1e-7),
    )?;
    failure.map_or(Ok(2.0 * est.value), Err)
}

/// The integral `I(α) = ∫ |z|^(-2-α) arg(1+z)² dz`, in polar coordinates.
fn winding_integral(alpha: f64) -> Result<f64> {
    let inner_tol = Tolerance::relative(1e-12);
    let mut failure: Option<Error> = None;
    let mut angular = |r: f64| -> f64 {
        // 2 ∫_0^π arg(1 + r e^{iψ})² dψ; steep near ψ = π when r ≈ 1.
        let f = |psi: f64| {
            let a = (r * psi.sin()).atan2(1.0 + r * psi.cos());
            a * a
        };
        let delta = (r - 1.0).abs();
        let mut breaks = vec![0.0];
        for k in [100.0, 10.0, 1.0] {
            let b = PI - k * delta;
            if b > *breaks.last().unwrap() && b < PI {
                breaks.push(b);
            }
        }
        breaks.push(PI);
        match integrate_with_breaks(f, &breaks, inner_tol) {
            Ok(e) => 2.0 * e.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let outer_tol = Tolerance::relative(1e-11);
    let near = integrate_power_origin(|r| r.powf(-1.0 - alpha) * angular(r), 1.0, 2.0 - alpha, outer_tol)?.value;
    let far = integrate_power_tail(|r| r.powf(-1.0 - alpha) * angular(r), 1.0, alpha, outer_tol)?.value;
    failure.map_or(Ok(near + far), Err)
}

/// Per-index constants of the limit theorems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub alpha: f64,
    /// Prefactor of the Lévy measure `ν`.
    #[serde(rename = "C_nu")]
    pub c_nu: f64,
    /// `K(α) = E|Z_1|^(-α)`, the large-time clock rate.
    #[serde(rename = "K")]
    pub clock_mean: f64,
    /// `I(α) = ∫ |z|^(-2-α) arg(1+z)² dz`.
    #[serde(rename = "I")]
    pub winding_integral: f64,
    /// `k(α) = C_ν I(α) = E ρ_1²`.
    #[serde(rename = "k")]
    pub rho_variance: f64,
    /// `r(α) = k(α) K(α)`, the variance rate of `θ_t / √(log t)`.
    #[serde(rename = "r")]
    pub spitzer_variance: f64,
    /// `L̃(α) = lim φ^(1+α) π̃(φ)`.
    #[serde(rename = "L_tilde")]
    pub small_angle: f64,
}

impl ConstantsTable {
    pub const CSV_HEADER: &'static str = "alpha,C_nu,K,I,k,r,L_tilde";

    /// One CSV row, every value with 12 significant digits.
    pub fn csv_row(&self) -> String {
        [
            self.alpha,
            self.c_nu,
            self.clock_mean,
            self.winding_integral,
            self.rho_variance,
            self.spitzer_variance,
            self.small_angle,
        ]
        .iter()
        .map(|v| format!("{v:.11e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Compute [`ConstantsTable`] for `α`.
pub fn compute_constants(alpha: f64) -> Result<ConstantsTable> {
    check_alpha(alpha)?;
    if 2.0 - alpha < MIN_DISTANCE_FROM_TWO {
        return Err(Error::Precision(format!("α = {alpha} is too close to 2 for the quadratures")));
    }
    let c = c_nu(alpha);
    let i = winding_integral(alpha)?;
    let k = c * i;
    Ok(ConstantsTable {
        alpha,
        c_nu: c,
        clock_mean: clock_mean(alpha),
        winding_integral: i,
        rho_variance: k,
        spitzer_variance: alpha * i / (2.0 * PI),
        small_angle: AngularDensity::new(alpha)?.small_angle_limit()?,
    })
}

/// The functions `L`, `U` and `h` of the truncated variance of `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedVariance {
    density: AngularDensity,
}

impl TruncatedVariance {
    /// `L(x) = 2 π̃((x, ∞))`.
    pub fn l(&self, x: f64) -> Result<f64> {
        Ok(2.0 * self.density.tail_mass(x)?)
    }

    /// `U(x) = 2 ∫_0^x y L(y) dy = 2 ∫_0^π min(x, φ)² π̃(φ) dφ`.
    pub fn u(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("U needs x > 0, got {x}")));
        }
        let inner = self.density.truncated_second_moment(x)?;
        let outer = if x < PI { x * x * self.density.tail_mass(x)? } else { 0.0 };
        Ok(2.0 * (inner + outer))
    }

    /// `h(y) = U(y) / y²`.
    pub fn h(&self, y: f64) -> Result<f64> {
        Ok(self.u(y)? / (y * y))
    }
}

pub fn truncated_variance(alpha: f64) -> Result<TruncatedVariance> {
    Ok(TruncatedVariance { density: AngularDensity::new(alpha)?.with_tolerance(1e-7) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_angle_oracle(alpha: f64) -> f64 {
        // ∫_R dx / (x² + φ²)^(1+α/2) = φ^(-1-α) √π Γ((1+α)/2) / Γ(1+α/2)
        c_nu(alpha) * PI.sqrt() * libm::tgamma((1.0 + alpha) / 2.0) / libm::tgamma(1.0 + alpha / 2.0)
    }

    #[test]
    fn prefactor_values() {
        // Planar Cauchy: Lévy density (2π)^-1 |x|^-3.
        assert!((c_nu(1.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((clock_mean(1.0) - 1.0).abs() < 1e-14);
        let oracle = 2f64.powf(-0.5) * libm::tgamma(0.75) / libm::tgamma(1.25);
        assert!((clock_mean(0.5) - oracle).abs() < 1e-12);
        assert!((clock_mean(0.5) - 0.9560).abs() < 5e-5);
    }

    #[test]
    fn nu_density_properties() {
        let x = ComplexPoint::new(0.3, -0.7);
        let d = density_nu(1.3, x).unwrap();
        assert!((density_nu(1.3, x * 2.0).unwrap() * 2f64.powf(3.3) / d - 1.0).abs() < 1e-13);
        let rotated = ComplexPoint::from_polar(x.norm(), x.arg() + 2.1);
        assert!((density_nu(1.3, rotated).unwrap() / d - 1.0).abs() < 1e-13);
        assert!(matches!(density_nu(1.3, ComplexPoint::ZERO), Err(Error::Singularity(_))));
        assert!(density_nu(2.0, x).is_err());
    }

    #[test]
    fn radial_and_reduced_forms_agree() {
        for alpha in [0.3, 0.5, 1.0, 1.5, 1.9] {
            let d = AngularDensity::new(alpha).unwrap();
            for phi in [1e-4, 0.01, 0.3, 1.0, PI / 2.0, 2.0, 3.0, 3.1, PI] {
                let a = d.density(phi).unwrap();
                let b = d.density_reduced(phi).unwrap();
                assert!((a / b - 1.0).abs() < 1e-7, "α = {alpha}, φ = {phi}: {a} vs {b}");
                assert_eq!(d.density(-phi).unwrap(), a);
            }
            assert_eq!(d.density(3.5).unwrap(), 0.0);
            assert!(matches!(d.density(0.0), Err(Error::Singularity(_))));
        }
    }

    #[test]
    fn small_angle_asymptotics() {
        for alpha in [0.5, 1.0, 1.5] {
            let d = AngularDensity::new(alpha).unwrap();
            let f = |phi: f64| phi.powf(1.0 + alpha) * d.density(phi).unwrap();
            assert!((f(1e-3) / f(1e-4) - 1.0).abs() < 0.01);
            let l = d.small_angle_limit().unwrap();
            assert!((l / small_angle_oracle(alpha) - 1.0).abs() < 1e-7);
            // The small-time limit of θ is the projection of Z on the
            // imaginary axis, whose law is exp(-|u|^α).
            assert!((stable_scale_from_tail(alpha, l) - 1.0).abs() < 1e-7, "α = {alpha}");
        }
    }

    #[test]
    fn constants_identities() {
        for alpha in [0.5, 1.0, 1.5] {
            let t = compute_constants(alpha).unwrap();
            assert!((t.spitzer_variance / (t.rho_variance * t.clock_mean) - 1.0).abs() < 1e-8);
            let k2 = AngularDensity::new(alpha).unwrap().second_moment().unwrap();
            assert!((k2 / t.rho_variance - 1.0).abs() < 1e-4, "α = {alpha}: {k2} vs {}", t.rho_variance);
        }
        assert!(matches!(compute_constants(2.0 - 1e-7), Err(Error::Domain(_)) | Err(Error::Precision(_))));
        assert!(compute_constants(0.0).is_err());
    }

    #[test]
    fn csv_row_has_twelve_digits() {
        let t = compute_constants(1.0).unwrap();
        let row = t.csv_row();
        assert_eq!(row.split(',').count(), 7);
        assert!(row.split(',').nth(2).unwrap().starts_with("1.00000000000e0"));
    }

    #[test]
    fn characteristic_exponent_properties() {
        let alpha = 1.2;
        let k = AngularDensity::new(alpha).unwrap().second_moment().unwrap();
        assert_eq!(characteristic_exponent(alpha, 0.0).unwrap(), 0.0);
        let u = 1e-3;
        let psi = characteristic_exponent(alpha, u).unwrap();
        assert!((psi / (u * u) / (k / 2.0) - 1.0).abs() < 1e-3);
        for u in [0.5, 2.0, 7.0] {
            let p = characteristic_exponent(alpha, u).unwrap();
            assert!((p - characteristic_exponent(alpha, -u).unwrap()).abs() < 1e-12);
            assert!(p > 0.0 && p <= k / 2.0 * u * u);
        }
    }

    #[test]
    fn truncated_variance_shape() {
        let tv = truncated_variance(1.0).unwrap();
        assert_eq!(tv.l(PI).unwrap(), 0.0);
        assert_eq!(tv.l(4.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for i in 1..=100 {
            let x = PI * i as f64 / 100.0;
            let u = tv.u(x).unwrap();
            assert!(u >= prev);
            prev = u;
        }
        let k = AngularDensity::new(1.0).unwrap().second_moment().unwrap();
        assert!((tv.u(PI).unwrap() / k - 1.0).abs() < 1e-5);
        assert!((tv.h(1.0).unwrap() - tv.u(1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn truncated_variance_power_law() {
        for alpha in [0.5, 1.0, 1.5] {
            let tv = truncated_variance(alpha).unwrap();
            let g = |x: f64| x.powf(alpha - 2.0) * tv.u(x).unwrap();
            let ratio = g(1e-2) / g(1e-3);
            assert!((ratio - 1.0).abs() < 0.05, "α = {alpha}: ratio {ratio}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn density_is_even_and_positive(alpha in 0.1f64..1.95, phi in 1e-3f64..PI) {
            let d = AngularDensity::new(alpha).unwrap();
            let a = d.density(phi).unwrap();
            prop_assert!(a > 0.0);
            prop_assert_eq!(a, d.density(-phi).unwrap());
        }
    }
}
