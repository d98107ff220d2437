//! Reproducible random streams and exact samplers for the primitive laws.
//!
//! Every replica of an experiment owns one [`Stream`], derived from an
//! [`RngSeed`] by [`derive_substream`]. Streams never share state, so a run
//! produces the same numbers whether replicas execute serially or on a
//! thread pool.
//!
//! The stable samplers use the Chambers–Mallows–Stuck / Kanter
//! transformations of a uniform angle and an independent unit exponential.
//! They are exact: no rejection loop and no tail truncation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The random stream type handed to every sampler.
pub type Stream = ChaCha8Rng;

/// Root seed plus replica index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub root: u64,
    #[serde(default)]
    pub stream_id: u64,
}

impl RngSeed {
    pub const fn new(root: u64) -> Self {
        RngSeed { root, stream_id: 0 }
    }

    pub const fn with_stream(root: u64, stream_id: u64) -> Self {
        RngSeed { root, stream_id }
    }

    /// Open the stream identified by this seed.
    pub fn stream(&self) -> Stream {
        let mut state = self.root;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Seed of the `index`-th child of this seed. Children of distinct
    /// `(root, stream_id)` pairs get distinct keys.
    pub fn child(&self, index: u64) -> RngSeed {
        let mut state = self.root ^ 0x6a09_e667_f3bc_c909;
        let a = splitmix64(&mut state);
        let mut state = a ^ self.stream_id.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let root = splitmix64(&mut state);
        RngSeed { root, stream_id: index }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child stream `index` of `seed`, deterministic in `(seed, index)`.
pub fn derive_substream(seed: RngSeed, index: u64) -> Stream {
    seed.child(index).stream()
}

/// One-sided stable law with Laplace transform `E[exp(-μX)] = exp(-μ^ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveStable {
    rho: f64,
}

impl PositiveStable {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::domain(format!("positive stable index must lie in (0, 1), got {rho}")));
        }
        Ok(PositiveStable { rho })
    }

    pub fn index(&self) -> f64 {
        self.rho
    }
}

impl Distribution<f64> for PositiveStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let rho = self.rho;
        let u = PI * rng.sample::<f64, _>(Open01);
        let e: f64 = rng.sample(Exp1);
        // Kanter: X = (A(U) / E)^((1-ρ)/ρ) with
        // A(U) = sin(ρU)^(ρ/(1-ρ)) sin((1-ρ)U) / sin(U)^(1/(1-ρ)).
        let one_minus = 1.0 - rho;
        let log_a = (rho / one_minus) * (rho * u).sin().ln() + (one_minus * u).sin().ln() - u.sin().ln() / one_minus;
        let x = ((one_minus / rho) * (log_a - e.ln())).exp();
        x.max(f64::MIN_POSITIVE)
    }
}

/// Symmetric stable law with characteristic function `exp(-|u|^α)`,
/// `0 < α <= 2`. At `α = 2` this is the centred normal of variance 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricStable {
    alpha: f64,
}

impl SymmetricStable {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain(format!("symmetric stable index must lie in (0, 2], got {alpha}")));
        }
        Ok(SymmetricStable { alpha })
    }

    pub fn index(&self) -> f64 {
        self.alpha
    }
}

impl Distribution<f64> for SymmetricStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let alpha = self.alpha;
        let v = PI * (rng.sample::<f64, _>(Open01) - 0.5);
        if alpha == 1.0 {
            return v.tan();
        }
        let w: f64 = rng.sample(Exp1);
        if alpha == 2.0 {
            return 2.0 * v.sin() * w.sqrt();
        }
        (alpha * v).sin() / v.cos().powf(1.0 / alpha) * ((((1.0 - alpha) * v).cos()) / w).powf((1.0 - alpha) / alpha)
    }
}

/// Standard Cauchy variate.
pub fn sample_cauchy<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (PI * (rng.sample::<f64, _>(Open01) - 0.5)).tan()
}

/// Standard normal variate.
#[inline]
pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// One variate with Laplace exponent `μ^ρ`.
pub fn sample_positive_stable<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> Result<f64> {
    Ok(PositiveStable::new(rho)?.sample(rng))
}

/// One variate with characteristic function `exp(-|u|^α)`.
pub fn sample_symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    Ok(SymmetricStable::new(alpha)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::special::{erfc, normal_cdf};

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    fn proportion_se(p: f64, n: usize) -> f64 {
        (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(PositiveStable::new(0.0).is_err());
        assert!(PositiveStable::new(1.0).is_err());
        assert!(PositiveStable::new(f64::NAN).is_err());
        assert!(SymmetricStable::new(0.0).is_err());
        assert!(SymmetricStable::new(2.5).is_err());
        assert!(SymmetricStable::new(2.0).is_ok());
    }

    #[test]
    fn laplace_transform_at_one() {
        // E[exp(-X)] = exp(-1) for every index.
        for (i, &rho) in [0.25, 0.3, 0.5, 0.75, 0.8].iter().enumerate() {
            let mut rng = derive_substream(RngSeed::new(11), i as u64);
            let law = PositiveStable::new(rho).unwrap();
            let xs: Vec<f64> = (0..100_000).map(|_| (-law.sample(&mut rng)).exp()).collect();
            let (m, se) = mean_and_se(&xs);
            assert!((m - (-1.0f64).exp()).abs() < 3.0 * se, "rho {rho}: {m} ± {se}");
        }
    }

    #[test]
    fn half_stable_matches_levy_cdf() {
        let mut rng = RngSeed::new(5).stream();
        let law = PositiveStable::new(0.5).unwrap();
        let n = 100_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng) <= 1.0).count();
        let p = erfc(0.5);
        assert!((p - 0.4795).abs() < 1e-4);
        let phat = hits as f64 / n as f64;
        assert!((phat - p).abs() < 3.0 * proportion_se(p, n), "{phat} vs {p}");
    }

    #[test]
    fn positive_stable_self_similarity() {
        // 4^(1/ρ) X has Laplace exponent 4 μ^ρ, as does a sum of four copies.
        let rho = 0.6;
        let law = PositiveStable::new(rho).unwrap();
        let mut rng = RngSeed::new(8).stream();
        let n = 10_000;
        let scaled: Vec<f64> = (0..n).map(|_| 4f64.powf(1.0 / rho) * law.sample(&mut rng)).collect();
        let summed: Vec<f64> = (0..n).map(|_| (0..4).map(|_| law.sample(&mut rng)).sum()).collect();
        let ks = crate::stats::ks_two_sample(&scaled, &summed).unwrap();
        assert!(ks.statistic < 0.02, "{}", ks.statistic);
    }

    #[test]
    fn symmetric_stable_known_cases() {
        let n = 100_000;
        let mut rng = RngSeed::new(1).stream();
        let cauchy = SymmetricStable::new(1.0).unwrap();
        let hits = (0..n).filter(|_| cauchy.sample(&mut rng) <= 1.0).count();
        assert!((hits as f64 / n as f64 - 0.75).abs() < 3.0 * proportion_se(0.75, n));

        let gauss = SymmetricStable::new(2.0).unwrap();
        let hits = (0..n).filter(|_| gauss.sample(&mut rng) <= 0.0).count();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 3.0 * proportion_se(0.5, n));
        // variance 2 at α = 2
        let xs: Vec<f64> = (0..n).map(|_| gauss.sample(&mut rng) / 2f64.sqrt()).collect();
        let hits = xs.iter().filter(|&&x| x <= 1.0).count();
        let p = normal_cdf(1.0);
        assert!((hits as f64 / n as f64 - p).abs() < 3.0 * proportion_se(p, n));
    }

    #[test]
    fn characteristic_function_on_grid() {
        // E cos(X) = exp(-1) and P(X > 0) = 1/2 on the index grid.
        for (i, &alpha) in [0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 1.8].iter().enumerate() {
            let mut rng = derive_substream(RngSeed::new(21), i as u64);
            let law = SymmetricStable::new(alpha).unwrap();
            let xs: Vec<f64> = (0..100_000).map(|_| law.sample(&mut rng)).collect();
            let cos: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
            let (m, se) = mean_and_se(&cos);
            assert!((m - (-1.0f64).exp()).abs() < 3.0 * se, "alpha {alpha}: {m} ± {se}");
            let pos = xs.iter().filter(|&&x| x > 0.0).count() as f64 / xs.len() as f64;
            assert!((pos - 0.5).abs() < 3.0 * proportion_se(0.5, xs.len()));
        }
    }

    #[test]
    fn substreams_are_deterministic_and_distinct() {
        let seed = RngSeed::new(42);
        let a: Vec<u64> = {
            let mut r = derive_substream(seed, 7);
            (0..1000).map(|_| r.random()).collect()
        };
        let b: Vec<u64> = {
            let mut r = derive_substream(seed, 7);
            (0..1000).map(|_| r.random()).collect()
        };
        let c: Vec<u64> = {
            let mut r = derive_substream(seed, 8);
            (0..1000).map(|_| r.random()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(RngSeed::with_stream(42, 1).child(0), RngSeed::with_stream(42, 2).child(0));
    }

    #[test]
    fn serial_and_parallel_replicas_agree() {
        use rayon::prelude::*;
        let seed = RngSeed::new(3);
        let law = SymmetricStable::new(1.3).unwrap();
        let run = |i: u64| {
            let mut r = derive_substream(seed, i);
            (0..100).map(|_| law.sample(&mut r)).sum::<f64>()
        };
        let serial: Vec<f64> = (0..10).map(run).collect();
        let parallel: Vec<f64> = (0..10u64).into_par_iter().map(run).collect();
        assert_eq!(serial, parallel);
    }
}
