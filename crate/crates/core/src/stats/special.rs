//! Reference special functions and closed-form CDFs.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for `x > 0` (Lanczos, g = 7).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard Cauchy CDF.
pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

/// CDF of the first hitting time of level `a` by a standard Brownian motion,
/// `P(T_a <= t) = 2 (1 - Φ(a / √t))`.
pub fn bm_hitting_cdf(a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0) || t.is_nan() {
        return Err(Error::domain(format!("hitting level must be positive, got {a}")));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(erfc(a / (2.0 * t).sqrt()))
}

/// Named special functions, for callers that select one at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialFunction {
    Gamma,
    Erf,
    NormalCdf,
    CauchyCdf,
    BmHittingCdf,
}

impl SpecialFunction {
    pub fn evaluate(self, args: &[f64]) -> Result<f64> {
        let arity = if self == SpecialFunction::BmHittingCdf { 2 } else { 1 };
        if args.len() != arity {
            return Err(Error::domain(format!("{self:?} takes {arity} argument(s), got {}", args.len())));
        }
        match self {
            SpecialFunction::Gamma => gamma(args[0]),
            SpecialFunction::Erf => Ok(erf(args[0])),
            SpecialFunction::NormalCdf => Ok(normal_cdf(args[0])),
            SpecialFunction::CauchyCdf => Ok(cauchy_cdf(args[0])),
            SpecialFunction::BmHittingCdf => bm_hitting_cdf(args[0], args[1]),
        }
    }
}
