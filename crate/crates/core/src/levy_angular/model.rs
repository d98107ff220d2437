use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::AngularDensity;
use crate::error::{Error, Result};
use crate::samplers::sample_normal;

const TABLE_NODES: usize = 10_000;
const TABLE_MIN: f64 = 1e-7;

/// Tabulated `π̃` and a direct simulator for `ρ`.
///
/// Jumps larger than the cutoff `ε` are drawn as a compound Poisson process
/// with intensity `2Λ(ε)`, `Λ(x) = ∫_x^π π̃`, and sizes from the normalised
/// restriction of `π̃` by inverse CDF. Smaller jumps are replaced by a
/// Brownian component with variance rate `2M(ε)`, `M(x) = ∫_0^x φ² π̃`.
/// Below the first table node the density is extended as `L̃ φ^(-1-α)`.
#[derive(Debug, Clone)]
pub struct AngularLevyModel {
    alpha: f64,
    epsilon: f64,
    small_angle: f64,
    log_x: Vec<f64>,
    tail: Vec<f64>,
    log_tail: Vec<f64>,
    /// d log x / d log Λ at the nodes, limited for monotonicity.
    inverse_slope: Vec<f64>,
    /// d log Λ / d log x at the nodes.
    tail_slope: Vec<f64>,
    log_inner: Vec<f64>,
    inner_slope: Vec<f64>,
}

impl AngularLevyModel {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        let density = AngularDensity::new(alpha)?;
        check_cutoff(epsilon)?;
        let n = TABLE_NODES;
        let (s0, s1) = (TABLE_MIN.ln(), PI.ln());
        let ds = (s1 - s0) / (n - 1) as f64;
        let log_x: Vec<f64> = (0..n).map(|j| if j == n - 1 { s1 } else { s0 + ds * j as f64 }).collect();

        // π̃ at the nodes and at the midpoints between them.
        let values: Vec<f64> = (0..2 * n - 1)
            .into_par_iter()
            .map(|i| {
                let s = if i % 2 == 0 { log_x[i / 2] } else { 0.5 * (log_x[i / 2] + log_x[i / 2 + 1]) };
                density.density(s.exp())
            })
            .collect::<Result<_>>()?;

        let small_angle = TABLE_MIN.powf(1.0 + alpha) * values[0];
        let mut tail = vec![0.0; n];
        let mut inner = vec![0.0; n];
        inner[0] = small_angle * TABLE_MIN.powf(2.0 - alpha) / (2.0 - alpha);
        // Simpson in s = log φ: dφ = e^s ds.
        let simpson = |j: usize, power: i32| {
            let h = log_x[j + 1] - log_x[j];
            let sm = 0.5 * (log_x[j] + log_x[j + 1]);
            let f = |s: f64, v: f64| v * (power as f64 * s).exp();
            h / 6.0 * (f(log_x[j], values[2 * j]) + 4.0 * f(sm, values[2 * j + 1]) + f(log_x[j + 1], values[2 * j + 2]))
        };
        for j in (0..n - 1).rev() {
            tail[j] = tail[j + 1] + simpson(j, 1);
        }
        for j in 1..n {
            inner[j] = inner[j - 1] + simpson(j - 1, 3);
        }

        let node_density: Vec<f64> = (0..n).map(|j| values[2 * j]).collect();
        let x: Vec<f64> = log_x.iter().map(|s| s.exp()).collect();
        let log_tail: Vec<f64> = tail.iter().map(|t| t.ln()).collect();
        let tail_slope: Vec<f64> = (0..n).map(|j| -x[j] * node_density[j] / tail[j]).collect();
        let mut inverse_slope: Vec<f64> = tail_slope.iter().map(|d| 1.0 / d).collect();
        // The last node has Λ = 0; the last interval is interpolated linearly in Λ.
        limit_slopes(&log_tail[..n - 1], &log_x[..n - 1], &mut inverse_slope[..n - 1]);
        let log_inner: Vec<f64> = inner.iter().map(|m| m.ln()).collect();
        let inner_slope: Vec<f64> = (0..n).map(|j| x[j].powi(3) * node_density[j] / inner[j]).collect();

        Ok(AngularLevyModel {
            alpha,
            epsilon,
            small_angle,
            log_x,
            tail,
            log_tail,
            inverse_slope,
            tail_slope,
            log_inner,
            inner_slope,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `L̃` as seen by the table.
    pub fn small_angle(&self) -> f64 {
        self.small_angle
    }

    /// `Λ(x) = ∫_x^π π̃`, zero for `x >= π`.
    pub fn tail_mass(&self, x: f64) -> f64 {
        let n = self.log_x.len();
        if x >= PI {
            return 0.0;
        }
        let x_min = TABLE_MIN;
        if x < x_min {
            return self.tail[0] + self.small_angle / self.alpha * (x.powf(-self.alpha) - x_min.powf(-self.alpha));
        }
        let s = x.ln();
        let j = self.interval(s);
        if j == n - 2 {
            let (a, b) = (self.log_x[j].exp(), PI);
            return self.tail[j] * (b - x) / (b - a);
        }
        hermite(
            s,
            self.log_x[j],
            self.log_x[j + 1],
            self.log_tail[j],
            self.log_tail[j + 1],
            self.tail_slope[j],
            self.tail_slope[j + 1],
        )
        .exp()
    }

    /// `M(x) = ∫_0^x φ² π̃`.
    pub fn inner_second_moment(&self, x: f64) -> f64 {
        let n = self.log_x.len();
        if x >= PI {
            return self.log_inner[n - 1].exp();
        }
        if x < TABLE_MIN {
            return self.small_angle * x.powf(2.0 - self.alpha) / (2.0 - self.alpha);
        }
        let s = x.ln();
        let j = self.interval(s);
        hermite(
            s,
            self.log_x[j],
            self.log_x[j + 1],
            self.log_inner[j],
            self.log_inner[j + 1],
            self.inner_slope[j],
            self.inner_slope[j + 1],
        )
        .exp()
    }

    /// `∫ φ² π̃` over `[-π, π]` from the table.
    pub fn second_moment(&self) -> f64 {
        2.0 * self.inner_second_moment(PI)
    }

    fn interval(&self, s: f64) -> usize {
        let n = self.log_x.len();
        self.log_x.partition_point(|&v| v <= s).clamp(1, n - 1) - 1
    }

    /// Size of a jump conditioned to exceed `cutoff`.
    fn jump_size<R: Rng + ?Sized>(&self, cutoff: f64, mass: f64, rng: &mut R) -> f64 {
        let n = self.log_x.len();
        let u: f64 = 1.0 - rng.random::<f64>();
        let target = u * mass;
        let x = if target >= self.tail[0] {
            let a = self.alpha;
            (TABLE_MIN.powf(-a) + a * (target - self.tail[0]) / self.small_angle).powf(-1.0 / a)
        } else if target <= self.tail[n - 2] {
            let a = self.log_x[n - 2].exp();
            a + (PI - a) * (1.0 - target / self.tail[n - 2])
        } else {
            let y = target.ln();
            // log_tail is decreasing; first index with log_tail < y.
            let k = self.log_tail[..n - 1].partition_point(|&v| v >= y).clamp(1, n - 2);
            hermite(
                y,
                self.log_tail[k - 1],
                self.log_tail[k],
                self.log_x[k - 1],
                self.log_x[k],
                self.inverse_slope[k - 1],
                self.inverse_slope[k],
            )
            .exp()
        };
        x.clamp(cutoff, PI)
    }

    /// Increment of `ρ` over `duration`, with jumps below `cutoff` replaced
    /// by their Gaussian variance.
    pub fn increment<R: Rng + ?Sized>(&self, duration: f64, cutoff: f64, rng: &mut R) -> Result<f64> {
        check_cutoff(cutoff)?;
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::domain(format!("duration must be finite and >= 0, got {duration}")));
        }
        if duration == 0.0 {
            return Ok(0.0);
        }
        let mass = self.tail_mass(cutoff);
        let sd = (2.0 * self.inner_second_moment(cutoff) * duration).sqrt();
        let mut x = sd * sample_normal(rng);
        let rate = 2.0 * mass * duration;
        if rate > 0.0 {
            let count = Poisson::new(rate).map_err(|e| Error::domain(e.to_string()))?.sample(rng) as u64;
            for _ in 0..count {
                let size = self.jump_size(cutoff, mass, rng);
                x += if rng.random::<bool>() { size } else { -size };
            }
        }
        Ok(x)
    }

    /// `ρ` on the uniform grid `0, horizon/steps, ..., horizon` with the
    /// model's cutoff.
    pub fn simulate_rho<R: Rng + ?Sized>(&self, horizon: f64, steps: usize, rng: &mut R) -> Result<Vec<f64>> {
        if !(horizon > 0.0 && horizon.is_finite()) || steps == 0 {
            return Err(Error::domain("simulate_rho needs horizon > 0 and at least one step"));
        }
        let dt = horizon / steps as f64;
        let mut out = Vec::with_capacity(steps + 1);
        let mut acc = 0.0;
        out.push(acc);
        for _ in 0..steps {
            acc += self.increment(dt, self.epsilon, rng)?;
            out.push(acc);
        }
        Ok(out)
    }
}

fn check_cutoff(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < PI) {
        return Err(Error::domain(format!("jump cutoff must lie in (0, π), got {epsilon}")));
    }
    Ok(())
}

/// Cubic Hermite interpolation on `[x0, x1]`.
fn hermite(x: f64, x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * d1
}

/// Fritsch–Carlson limiter: keeps the Hermite interpolant of `(xs, ys)`
/// monotone.
fn limit_slopes(xs: &[f64], ys: &[f64], d: &mut [f64]) {
    for k in 0..xs.len() - 1 {
        let secant = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        if secant == 0.0 {
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        let (a, b) = (d[k] / secant, d[k + 1] / secant);
        if a < 0.0 {
            d[k] = 0.0;
        }
        if b < 0.0 {
            d[k + 1] = 0.0;
        }
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[k] = tau * a * secant;
            d[k + 1] = tau * b * secant;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_angular::stable_scale_from_tail;
    use crate::samplers::{RngSeed, SymmetricStable};
    use crate::stats::{ks_two_sample, mean, variance};

    #[test]
    fn table_matches_quadrature() {
        for alpha in [0.5, 1.0, 1.5] {
            let model = AngularLevyModel::new(alpha, 1e-3).unwrap();
            let d = AngularDensity::new(alpha).unwrap();
            let k = d.second_moment().unwrap();
            assert!((model.second_moment() / k - 1.0).abs() < 1e-6, "α = {alpha}");
            for x in [1e-9, 1e-5, 1e-3, 0.1, 1.0, 3.0] {
                let exact = d.tail_mass(x).unwrap();
                assert!((model.tail_mass(x) / exact - 1.0).abs() < 1e-6, "α = {alpha}, x = {x}");
                let m = d.truncated_second_moment(x).unwrap();
                assert!((model.inner_second_moment(x) / m - 1.0).abs() < 1e-6, "α = {alpha}, x = {x}");
            }
        }
    }

    #[test]
    fn jump_sizes_follow_the_restricted_law() {
        let alpha = 1.2;
        let model = AngularLevyModel::new(alpha, 1e-2).unwrap();
        let mut rng = RngSeed::new(8).stream();
        let cutoff = 1e-2;
        let mass = model.tail_mass(cutoff);
        let n = 200_000;
        for x in [0.02, 0.1, 1.0, 3.0] {
            let hits = (0..n).filter(|_| model.jump_size(cutoff, mass, &mut rng) > x).count() as f64 / n as f64;
            let p = model.tail_mass(x) / mass;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits - p).abs() < 4.0 * se + 1e-12, "x = {x}: {hits} vs {p}");
        }
    }

    #[test]
    fn rho_variance_and_mean() {
        let alpha = 1.0;
        let model = AngularLevyModel::new(alpha, 1e-3).unwrap();
        let k = model.second_moment();
        let seed = RngSeed::new(77);
        let xs: Vec<f64> = (0..10_000)
            .map(|i| *model.simulate_rho(1.0, 1, &mut seed.child(i).stream()).unwrap().last().unwrap())
            .collect();
        assert!((variance(&xs) / k - 1.0).abs() < 0.05);
        let se = (variance(&xs) / xs.len() as f64).sqrt();
        assert!(mean(&xs).abs() < 3.0 * se);
    }

    #[test]
    fn small_time_stable_limit() {
        let alpha = 1.2;
        let model = AngularLevyModel::new(alpha, 1e-3).unwrap();
        let sigma = stable_scale_from_tail(alpha, model.small_angle());
        let u: f64 = 1e-4;
        let scale = u.powf(1.0 / alpha);
        let seed = RngSeed::new(5);
        let rho: Vec<f64> =
            (0..5000).map(|i| model.increment(u, 0.01 * scale, &mut seed.child(i).stream()).unwrap() / scale).collect();
        let law = SymmetricStable::new(alpha).unwrap();
        let mut rng = seed.child(1 << 40).stream();
        let reference: Vec<f64> = (0..5000).map(|_| sigma * law.sample(&mut rng)).collect();
        assert!(ks_two_sample(&rho, &reference).unwrap().statistic < 0.05);
    }

    #[test]
    fn cutoff_validation() {
        assert!(AngularLevyModel::new(1.0, 0.0).is_err());
        assert!(AngularLevyModel::new(1.0, PI).is_err());
        let model = AngularLevyModel::new(1.0, 0.5).unwrap();
        assert!(model.increment(1.0, 4.0, &mut RngSeed::new(1).stream()).is_err());
        assert_eq!(model.increment(0.0, 0.5, &mut RngSeed::new(1).stream()).unwrap(), 0.0);
    }
}
