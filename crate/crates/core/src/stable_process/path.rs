use rand::Rng;
use rand_distr::Distribution;

use super::{ComplexPoint, PathConfig, PlanarPath, StableIndex};
use crate::error::{Error, Result};
use crate::samplers::{sample_normal, PositiveStable};

/// Points closer than this to the origin are resampled.
const ORIGIN_GUARD: f64 = 1e-300;

/// Running state handed to a stop predicate after every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepState {
    pub time: f64,
    pub point: ComplexPoint,
    /// Winding around 0 accumulated since the start of the path.
    pub theta: f64,
    /// Clock accumulated since the start of the path.
    pub clock: f64,
}

/// Configurable path generator.
///
/// ```
/// use windings_core::samplers::RngSeed;
/// use windings_core::stable_process::{PathBuilder, PathConfig, StableIndex};
///
/// let config = PathConfig { horizon: 0.5, ..PathConfig::default() };
/// let builder = PathBuilder::new(StableIndex::planar(1.2).unwrap(), config).unwrap();
/// let path = builder.generate(&mut RngSeed::new(1).stream()).unwrap();
/// assert_eq!(path.horizon(), 0.5);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct PathBuilder {
    alpha: StableIndex,
    config: PathConfig,
    start_time: f64,
    start_point: ComplexPoint,
    nodes: Vec<f64>,
}

impl PathBuilder {
    pub fn new(alpha: StableIndex, config: PathConfig) -> Result<Self> {
        config.validate()?;
        Ok(PathBuilder { alpha, config, start_time: 0.0, start_point: ComplexPoint::ONE, nodes: Vec::new() })
    }

    /// Start from `z0` at time `t0` instead of from `1` at time 0.
    pub fn start_at(mut self, t0: f64, z0: ComplexPoint) -> Result<Self> {
        if !(t0.is_finite() && t0 >= 0.0 && t0 <= self.config.horizon) {
            return Err(Error::domain(format!("start time {t0} outside [0, {}]", self.config.horizon)));
        }
        if !z0.is_finite() || z0.norm() < ORIGIN_GUARD {
            return Err(Error::DegenerateGeometry(format!("start point {z0:?}")));
        }
        self.start_time = t0;
        self.start_point = z0;
        Ok(self)
    }

    /// Times the path must pass through exactly. Nodes outside
    /// `(start, horizon)` are ignored.
    pub fn with_nodes(mut self, nodes: &[f64]) -> Self {
        let mut nodes: Vec<f64> =
            nodes.iter().copied().filter(|&t| t > self.start_time && t < self.config.horizon).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        self.nodes = nodes;
        self
    }

    pub fn config(&self) -> &PathConfig {
        &self.config
    }

    pub fn alpha(&self) -> StableIndex {
        self.alpha
    }

    /// Generate up to the horizon.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PlanarPath> {
        self.generate_until(rng, |_| false)
    }

    /// Generate until the horizon or until `stop` returns true after a step.
    pub fn generate_until<R, P>(&self, rng: &mut R, mut stop: P) -> Result<PlanarPath>
    where
        R: Rng + ?Sized,
        P: FnMut(&StepState) -> bool,
    {
        let alpha = self.alpha.value();
        let cfg = &self.config;
        let subordinator = if self.alpha.is_brownian() { None } else { Some(PositiveStable::new(alpha / 2.0)?) };

        let capacity = cfg.max_points.min(1 << 16);
        let mut path = PlanarPath::start(self.alpha, self.start_time, self.start_point, capacity);
        let (mut t, mut z) = (self.start_time, self.start_point);
        let (mut theta, mut clock) = (0.0, 0.0);
        let mut nodes = self.nodes.iter().copied().chain(std::iter::once(cfg.horizon)).peekable();

        while t < cfg.horizon {
            if path.len() >= cfg.max_points {
                return Err(Error::PathBudget { budget: cfg.max_points, partial: Box::new(path) });
            }
            while nodes.peek().is_some_and(|&n| n <= t) {
                nodes.next();
            }
            let target = *nodes.peek().expect("horizon is always pending while t < horizon");

            let mut h = (cfg.angle_cap * z.norm()).powf(alpha).min(cfg.base_step).max(cfg.min_step);
            let t_next = if h >= target - t {
                h = target - t;
                target
            } else {
                t + h
            };

            let z_next = loop {
                // Per-coordinate standard deviation of the step.
                let sd = match &subordinator {
                    Some(s) => (2.0 * h.powf(2.0 / alpha) * s.sample(rng)).sqrt(),
                    None => h.sqrt(),
                };
                let candidate = z + ComplexPoint::new(sd * sample_normal(rng), sd * sample_normal(rng));
                if candidate.norm() >= ORIGIN_GUARD {
                    break candidate;
                }
                path.note_origin_resample();
            };

            let (dtheta, dh) = path.push(t_next, h, z_next);
            t = t_next;
            z = z_next;
            theta += dtheta;
            clock += dh;
            if stop(&StepState { time: t, point: z, theta, clock }) {
                break;
            }
        }
        Ok(path)
    }
}

/// Sample a path of the planar stable process of index `alpha` on
/// `[0, config.horizon]`, started at `1`. `alpha = 2` gives standard planar
/// Brownian motion.
pub fn generate_path<R: Rng + ?Sized>(alpha: StableIndex, config: &PathConfig, rng: &mut R) -> Result<PlanarPath> {
    PathBuilder::new(alpha, *config)?.generate(rng)
}
