use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary functions for the small-time crossing checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFamily {
    /// `f(t) = t^(1/α) (log 1/t)^(β/α)` near 0, held constant beyond the
    /// point where it stops increasing. In the integral test it is read as
    /// `t^(1/α) (log t)^(β/α)` on `[e, ∞)`.
    Bertrand { beta: f64 },
    /// Values `f(t_i)` of a boundary on `[1, ∞)`, for the integral test.
    /// `t` strictly increasing with `t_0 > 1`, `f` positive and nondecreasing.
    Tabulated { t: Vec<f64>, f: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralVerdict {
    Converges,
    Diverges,
}

impl BoundaryFamily {
    pub fn bertrand(beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!("Bertrand exponent must be finite and >= 0, got {beta}")));
        }
        Ok(BoundaryFamily::Bertrand { beta })
    }

    pub fn id(&self) -> String {
        match self {
            BoundaryFamily::Bertrand { beta } => format!("bertrand(beta={beta})"),
            BoundaryFamily::Tabulated { t, .. } => format!("tabulated({} points)", t.len()),
        }
    }

    /// The boundary at a small time `t ∈ (0, 1]` for index `α`.
    ///
    /// Only the Bertrand family has a small-time form; tabulated boundaries
    /// are a domain error.
    pub fn value(&self, alpha: f64, t: f64) -> Result<f64> {
        let BoundaryFamily::Bertrand { beta } = *self else {
            return Err(Error::domain("tabulated boundaries have no small-time form"));
        };
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("boundary time must lie in (0, 1], got {t}")));
        }
        // d/dt log f = (1 - β / log(1/t)) / (α t) changes sign at log(1/t) = β.
        let turn = (-beta.max(1.0)).exp();
        let s = t.min(turn);
        Ok(s.powf(1.0 / alpha) * (-s.ln()).powf(beta / alpha))
    }

    fn validate(&self) -> Result<()> {
        match self {
            BoundaryFamily::Bertrand { beta } => Self::bertrand(*beta).map(|_| ()),
            BoundaryFamily::Tabulated { t, f } => {
                if t.len() < 3 || t.len() != f.len() {
                    return Err(Error::domain("tabulated boundary needs at least three (t, f) pairs"));
                }
                if !(t[0] > 1.0) || t.windows(2).any(|w| !(w[1] > w[0])) || !t[t.len() - 1].is_finite() {
                    return Err(Error::domain("tabulated times must be finite, strictly increasing and > 1"));
                }
                if f.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return Err(Error::domain("tabulated boundary must be positive and finite"));
                }
                if f.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::domain("tabulated boundary is not monotone"));
                }
                Ok(())
            }
        }
    }
}

/// Whether `∫_1^∞ f(t)^(-α) dt` is finite.
///
/// Bertrand boundaries are decided in closed form: the integrand is
/// `1 / (t (log t)^β)`, finite iff `β > 1`. Tabulated boundaries are decided
/// by the decay of `g(t) = t f(t)^(-α)`: the slope `s` of `log g` against
/// `log log t` over the upper half of the table (in `log log t`) is
/// extrapolated, and the integral converges iff `s < -1`. Pure power tails
/// give slopes far below -1 and are classified correctly as well.
pub fn integral_test(alpha: f64, family: &BoundaryFamily) -> Result<IntegralVerdict> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Range { value: alpha, low: 0.0, high: 2.0 });
    }
    family.validate()?;
    let verdict = |converges: bool| if converges { IntegralVerdict::Converges } else { IntegralVerdict::Diverges };
    match family {
        BoundaryFamily::Bertrand { beta } => Ok(verdict(*beta > 1.0)),
        BoundaryFamily::Tabulated { t, f } => {
            let x: Vec<f64> = t.iter().map(|&s| s.ln().ln()).collect();
            let y: Vec<f64> = t.iter().zip(f).map(|(&s, &v)| s.ln() - alpha * v.ln()).collect();
            let mid = 0.5 * (x[0] + x[x.len() - 1]);
            let from = x.partition_point(|&v| v < mid).min(x.len() - 2);
            let slope = least_squares_slope(&x[from..], &y[from..]);
            Ok(verdict(slope < -1.0 - 1e-6))
        }
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `f(t) = t^(1/α) (log t)^(β/α)` tabulated at `log log t ∈ [0, 5]`.
    fn tabulated_bertrand(alpha: f64, beta: f64) -> BoundaryFamily {
        let (t, f) = (0..=60)
            .map(|i| {
                let s = (5.0 * i as f64 / 60.0).exp().exp();
                (s, s.powf(1.0 / alpha) * s.ln().powf(beta / alpha))
            })
            .unzip();
        BoundaryFamily::Tabulated { t, f }
    }

    #[test]
    fn bertrand_criterion() {
        for alpha in [0.5, 1.0, 1.5] {
            for (beta, expected) in [
                (0.0, IntegralVerdict::Diverges),
                (0.5, IntegralVerdict::Diverges),
                (1.0, IntegralVerdict::Diverges),
                (1.5, IntegralVerdict::Converges),
                (3.0, IntegralVerdict::Converges),
            ] {
                let family = BoundaryFamily::bertrand(beta).unwrap();
                assert_eq!(integral_test(alpha, &family).unwrap(), expected, "α={alpha} β={beta}");
                assert_eq!(
                    integral_test(alpha, &tabulated_bertrand(alpha, beta)).unwrap(),
                    expected,
                    "α={alpha} β={beta}"
                );
            }
        }
    }

    #[test]
    fn power_tails() {
        let t: Vec<f64> = (1..40).map(|i| 1.5f64.powi(i)).collect();
        let fast = BoundaryFamily::Tabulated { t: t.clone(), f: t.iter().map(|s| s.powf(2.0)).collect() };
        let slow = BoundaryFamily::Tabulated { t: t.clone(), f: t.iter().map(|s| s.powf(0.5)).collect() };
        assert_eq!(integral_test(1.0, &fast).unwrap(), IntegralVerdict::Converges);
        assert_eq!(integral_test(1.0, &slow).unwrap(), IntegralVerdict::Diverges);
    }

    #[test]
    fn rejects_bad_tables() {
        let t = vec![2.0, 3.0, 4.0];
        let non_monotone = BoundaryFamily::Tabulated { t: t.clone(), f: vec![1.0, 3.0, 2.0] };
        assert!(matches!(integral_test(1.0, &non_monotone), Err(Error::Domain(_))));
        let short = BoundaryFamily::Tabulated { t: vec![2.0, 3.0], f: vec![1.0, 2.0] };
        assert!(integral_test(1.0, &short).is_err());
        let low = BoundaryFamily::Tabulated { t: vec![0.5, 3.0, 4.0], f: vec![1.0, 2.0, 3.0] };
        assert!(integral_test(1.0, &low).is_err());
        assert!(BoundaryFamily::bertrand(-1.0).is_err());
        assert!(integral_test(2.5, &BoundaryFamily::Bertrand { beta: 0.0 }).is_err());
    }

    #[test]
    fn small_time_form_is_monotone() {
        for beta in [0.0, 0.5, 3.0] {
            let f = BoundaryFamily::bertrand(beta).unwrap();
            let mut prev = 0.0;
            for n in (0..=40).rev() {
                let v = f.value(1.2, 2f64.powi(-n)).unwrap();
                assert!(v > 0.0 && v >= prev, "β={beta} n={n}");
                prev = v;
            }
        }
        let f = BoundaryFamily::bertrand(0.0).unwrap();
        assert!((f.value(1.0, 0.25).unwrap() - 0.25).abs() < 1e-15);
        assert!(f.value(1.0, 0.0).is_err());
    }
}
