//! Statistical verification kernel: empirical CDFs, Kolmogorov–Smirnov
//! statistics, moment estimates with bootstrap intervals and reference laws.
//!
//! Samples may contain `+∞` to encode right-censored observations (an exit
//! that never happened before the horizon); NaN is rejected everywhere.

pub mod special;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{sample_normal, SymmetricStable};

/// Result of a Kolmogorov–Smirnov comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    /// Second sample size; `None` for one-sample tests.
    pub m: Option<usize>,
    /// Asymptotic critical value at the 1% level.
    pub critical_ref: f64,
}

impl KsResult {
    /// Whether the statistic exceeds the asymptotic 1% critical value.
    pub fn rejects_at_one_percent(&self) -> bool {
        self.statistic > self.critical_ref
    }
}

// sqrt(-ln(0.005) / 2), the Kolmogorov 1% quantile.
const KOLMOGOROV_1PCT: f64 = 1.627_624_4;

/// Limit laws the experiments compare against.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceLaw {
    Normal {
        variance: f64,
    },
    Cauchy,
    /// `scale · X` with `E exp(iuX) = exp(-|u|^α)`; sampler only.
    SymmetricStable {
        alpha: f64,
        scale: f64,
    },
    /// First hitting time of `level` by a standard Brownian motion.
    BmHitting {
        level: f64,
    },
    Empirical(Vec<f64>),
}

impl ReferenceLaw {
    pub fn has_cdf(&self) -> bool {
        !matches!(self, ReferenceLaw::SymmetricStable { .. })
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        match self {
            ReferenceLaw::Normal { variance } => Some(special::normal_cdf(x / variance.sqrt())),
            ReferenceLaw::Cauchy => Some(special::cauchy_cdf(x)),
            ReferenceLaw::SymmetricStable { .. } => None,
            ReferenceLaw::BmHitting { level } => special::bm_hitting_cdf(*level, x).ok(),
            ReferenceLaw::Empirical(values) => {
                let below = values.iter().filter(|&&v| v <= x).count();
                Some(below as f64 / values.len() as f64)
            }
        }
    }

    /// Draw one variate, when the law has a sampler.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        match self {
            ReferenceLaw::Normal { variance } => Some(variance.sqrt() * sample_normal(rng)),
            ReferenceLaw::Cauchy => Some(crate::samplers::sample_cauchy(rng)),
            ReferenceLaw::SymmetricStable { alpha, scale } => {
                SymmetricStable::new(*alpha).ok().map(|law| scale * law.sample(rng))
            }
            ReferenceLaw::BmHitting { level } => {
                let g = sample_normal(rng);
                Some((level / g).powi(2))
            }
            ReferenceLaw::Empirical(values) if !values.is_empty() => Some(values[rng.random_range(0..values.len())]),
            ReferenceLaw::Empirical(_) => None,
        }
    }
}

fn check_sample(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::domain(format!("{what}: empty sample")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::domain(format!("{what}: sample contains NaN")));
    }
    Ok(())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Empirical CDF of `values` evaluated at each point of `at`.
pub fn ecdf(values: &[f64], at: &[f64]) -> Vec<f64> {
    let v = sorted(values);
    let n = v.len() as f64;
    at.iter().map(|&x| v.partition_point(|&y| y <= x) as f64 / n).collect()
}

/// One-sample KS statistic `sup |F_n - F|` against a law exposing a CDF.
pub fn ks_one_sample(sample: &[f64], law: &ReferenceLaw) -> Result<KsResult> {
    if !law.has_cdf() {
        return Err(Error::domain("one-sample KS needs a law with a CDF"));
    }
    ks_one_sample_cdf(sample, |x| law.cdf(x).unwrap_or(f64::NAN))
}

/// One-sample KS statistic against an arbitrary continuous CDF.
pub fn ks_one_sample_cdf<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<KsResult> {
    ks_one_sample_censored(sample, cdf, f64::INFINITY)
}

/// KS distance restricted to `x <= cutoff`: observations above the cutoff
/// are right-censored and only their count matters.
pub fn ks_one_sample_censored<F: Fn(f64) -> f64>(sample: &[f64], cdf: F, cutoff: f64) -> Result<KsResult> {
    check_sample(sample, "ks_one_sample")?;
    let xs = sorted(sample);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut below = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        if x > cutoff {
            break;
        }
        let f = cdf(x);
        if f.is_nan() {
            return Err(Error::domain(format!("CDF undefined at {x}")));
        }
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
        below = i + 1;
    }
    if cutoff.is_finite() {
        let f = cdf(cutoff);
        d = d.max((f - below as f64 / n).abs());
    }
    Ok(KsResult { statistic: d.clamp(0.0, 1.0), n: xs.len(), m: None, critical_ref: KOLMOGOROV_1PCT / n.sqrt() })
}

/// Two-sample KS statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    check_sample(a, "ks_two_sample (first)")?;
    check_sample(b, "ks_two_sample (second)")?;
    let (xa, xb) = (sorted(a), sorted(b));
    let (n, m) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = if xa[i].total_cmp(&xb[j]).is_le() { xa[i] } else { xb[j] };
        while i < n && xa[i].total_cmp(&x).is_le() {
            i += 1;
        }
        while j < m && xb[j].total_cmp(&x).is_le() {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(KsResult {
        statistic: d.clamp(0.0, 1.0),
        n,
        m: Some(m),
        critical_ref: KOLMOGOROV_1PCT * ((nf + mf) / (nf * mf)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub mean_ci: (f64, f64),
    pub variance_ci: (f64, f64),
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased variance; zero for fewer than two values.
pub fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

/// Pearson correlation of two equally long samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Linear-interpolated quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean and unbiased variance with 95% percentile-bootstrap intervals.
pub fn moment_estimate<R: Rng + ?Sized>(sample: &[f64], bootstrap_reps: usize, rng: &mut R) -> Result<MomentEstimate> {
    if sample.len() < 2 {
        return Err(Error::domain("moment estimate needs at least two values"));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("moment estimate needs finite values"));
    }
    if bootstrap_reps < 100 {
        return Err(Error::domain(format!("need at least 100 bootstrap replicates, got {bootstrap_reps}")));
    }
    let n = sample.len();
    let mut means = Vec::with_capacity(bootstrap_reps);
    let mut vars = Vec::with_capacity(bootstrap_reps);
    let mut resample = vec![0.0; n];
    for _ in 0..bootstrap_reps {
        for slot in resample.iter_mut() {
            *slot = sample[rng.random_range(0..n)];
        }
        means.push(mean(&resample));
        vars.push(variance(&resample));
    }
    means.sort_by(f64::total_cmp);
    vars.sort_by(f64::total_cmp);
    let ci = |v: &[f64]| (quantile_sorted(v, 0.025), quantile_sorted(v, 0.975));
    Ok(MomentEstimate { mean: mean(sample), variance: variance(sample), mean_ci: ci(&means), variance_ci: ci(&vars) })
}
