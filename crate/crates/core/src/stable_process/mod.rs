//! Planar isotropic stable paths started at `1 + 0i`.
//!
//! A path is built by subordinating a planar Brownian motion: over a local
//! step of duration `h` the increment is a planar Gaussian whose
//! per-coordinate variance is `2ΔS`, with `ΔS = h^(2/α) S` and `S` one-sided
//! stable of index `α/2`. This reproduces `E exp(i<λ, Z_h>) = exp(-h|λ|^α)`
//! exactly at every node.
//!
//! The winding number of the sampled path is the winding of the polygon
//! through its nodes, so the only discretisation error is looping that
//! happens inside one step. Steps are therefore chosen *before* sampling as
//! `h <= (angle_cap |z|)^α ∧ base_step`, which keeps the typical increment a
//! small fraction of the distance to the origin without biasing the law.

mod path;
mod winding;

pub use path::{generate_path, PathBuilder, StepState};
pub use winding::{
    clock_series, coarsened_winding, exit_time, inverse_clock, loses_loop_when_coarsened, principal_arg_ratio,
    rho_series, winding_series, ConeMode, ConeSpec, ExitTimeRecord,
};

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub const ONE: ComplexPoint = ComplexPoint { re: 1.0, im: 0.0 };
    pub const ZERO: ComplexPoint = ComplexPoint { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        ComplexPoint { re, im }
    }

    pub fn from_polar(r: f64, angle: f64) -> Self {
        ComplexPoint { re: r * angle.cos(), im: r * angle.sin() }
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(self) -> f64 {
        let a = self.im.atan2(self.re);
        if a == -PI {
            PI
        } else {
            a
        }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl std::ops::Add for ComplexPoint {
    type Output = ComplexPoint;
    fn add(self, o: ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(self.re + o.re, self.im + o.im)
    }
}

impl std::ops::Sub for ComplexPoint {
    type Output = ComplexPoint;
    fn sub(self, o: ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(self.re - o.re, self.im - o.im)
    }
}

impl std::ops::Mul<f64> for ComplexPoint {
    type Output = ComplexPoint;
    fn mul(self, s: f64) -> ComplexPoint {
        ComplexPoint::new(self.re * s, self.im * s)
    }
}

/// Stable index `α`. Values in `(0, 2)` are planar stable; `α = 2` selects
/// standard planar Brownian motion (per-coordinate variance `t`) and is only
/// accepted by routines that say so.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StableIndex(f64);

impl StableIndex {
    /// Any index in `(0, 2]`.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 2.0 {
            Ok(StableIndex(alpha))
        } else {
            Err(Error::domain(format!("stable index must lie in (0, 2], got {alpha}")))
        }
    }

    /// A planar stable index, strictly inside `(0, 2)`.
    pub fn planar(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 2.0 {
            Ok(StableIndex(alpha))
        } else {
            Err(Error::domain(format!("planar stable index must lie in (0, 2), got {alpha}")))
        }
    }

    pub const fn brownian() -> Self {
        StableIndex(2.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_brownian(self) -> bool {
        self.0 == 2.0
    }
}

impl TryFrom<f64> for StableIndex {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        StableIndex::new(v)
    }
}

impl From<StableIndex> for f64 {
    fn from(a: StableIndex) -> f64 {
        a.0
    }
}

/// Discretisation control for [`generate_path`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    /// Final time `T`.
    pub horizon: f64,
    /// Upper bound on a local step.
    pub base_step: f64,
    /// Target bound on the winding increment of one step.
    pub angle_cap: f64,
    /// Floor on a local step (mandatory nodes and the horizon may cut below it).
    /// The default is the smallest normal `f64`: planar Brownian paths come
    /// within `e^-30` of the origin at `t = e^12`, and any coarser floor
    /// throws them out of the neighbourhood where they collect most of their
    /// clock.
    pub min_step: f64,
    /// Maximum number of nodes, including the start.
    pub max_points: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            horizon: 1.0,
            base_step: 1e-2,
            angle_cap: PI / 8.0,
            min_step: f64::MIN_POSITIVE,
            max_points: 10_000_000,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(format!("horizon must be finite and >= 0, got {}", self.horizon)));
        }
        if !(self.min_step > 0.0 && self.min_step <= self.base_step) {
            return Err(Error::domain(format!(
                "need 0 < min_step <= base_step, got {} and {}",
                self.min_step, self.base_step
            )));
        }
        if !(self.angle_cap > 0.0 && self.angle_cap < PI) {
            return Err(Error::domain(format!("angle_cap must lie in (0, π), got {}", self.angle_cap)));
        }
        if self.max_points < 2 {
            return Err(Error::domain("max_points must be at least 2"));
        }
        Ok(())
    }
}

/// A sampled planar path with its winding and clock increments around 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    alpha: StableIndex,
    times: Vec<f64>,
    points: Vec<ComplexPoint>,
    winding_increments: Vec<f64>,
    clock_increments: Vec<f64>,
    origin_resamples: usize,
}

impl PlanarPath {
    /// Build a path from explicit nodes (synthetic paths, replays).
    pub fn from_points(alpha: StableIndex, times: Vec<f64>, points: Vec<ComplexPoint>) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::domain("times and points must be non-empty and of equal length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("times must be strictly increasing"));
        }
        if let Some(z) = points.iter().find(|z| !z.is_finite() || z.norm_sqr() == 0.0) {
            return Err(Error::DegenerateGeometry(format!("path point {z:?} is the origin or not finite")));
        }
        let mut path = PlanarPath {
            alpha,
            times: Vec::with_capacity(points.len()),
            points: Vec::with_capacity(points.len()),
            winding_increments: Vec::with_capacity(points.len()),
            clock_increments: Vec::with_capacity(points.len()),
            origin_resamples: 0,
        };
        path.times.push(times[0]);
        path.points.push(points[0]);
        for w in times.windows(2).zip(&points[1..]) {
            let (pair, &z) = w;
            path.push(pair[1], pair[1] - pair[0], z);
        }
        Ok(path)
    }

    pub(crate) fn start(alpha: StableIndex, t0: f64, z0: ComplexPoint, capacity: usize) -> Self {
        let mut times = Vec::with_capacity(capacity);
        let mut points = Vec::with_capacity(capacity);
        times.push(t0);
        points.push(z0);
        PlanarPath {
            alpha,
            times,
            points,
            winding_increments: Vec::with_capacity(capacity),
            clock_increments: Vec::with_capacity(capacity),
            origin_resamples: 0,
        }
    }

    /// Append a node at time `t` reached by a step of length `dt`; returns
    /// the winding and clock increments of the step.
    ///
    /// The clock uses `dt` rather than the difference of stored times, which
    /// rounds to 0 for steps below the resolution of `t`.
    pub(crate) fn push(&mut self, t: f64, dt: f64, z: ComplexPoint) -> (f64, f64) {
        let z_prev = *self.points.last().unwrap();
        let a = self.alpha.value();
        let dtheta = principal_arg_ratio(z_prev, z, ComplexPoint::ZERO);
        let dh = 0.5 * (z_prev.norm().powf(-a) + z.norm().powf(-a)) * dt;
        self.times.push(t);
        self.points.push(z);
        self.winding_increments.push(dtheta);
        self.clock_increments.push(dh);
        (dtheta, dh)
    }

    pub(crate) fn note_origin_resample(&mut self) {
        self.origin_resamples += 1;
    }

    pub fn alpha(&self) -> StableIndex {
        self.alpha
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[ComplexPoint] {
        &self.points
    }

    pub fn winding_increments(&self) -> &[f64] {
        &self.winding_increments
    }

    pub fn clock_increments(&self) -> &[f64] {
        &self.clock_increments
    }

    /// Number of steps in which a point landed within 1e-300 of the origin
    /// and was resampled.
    pub fn origin_resamples(&self) -> usize {
        self.origin_resamples
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    /// Last sampled time.
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn end_point(&self) -> ComplexPoint {
        *self.points.last().unwrap()
    }

    /// Cumulative winding around 0 at every node, starting from 0.
    pub fn theta(&self) -> Vec<f64> {
        cumulative(&self.winding_increments)
    }

    /// Clock `H` at every node, starting from 0.
    pub fn clock(&self) -> Vec<f64> {
        cumulative(&self.clock_increments)
    }

    /// `log |Z|` at every node.
    pub fn log_radius(&self) -> Vec<f64> {
        self.points.iter().map(|z| z.norm().ln()).collect()
    }

    /// Write `t,re,im,theta,H`, one row per node, with a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,re,im,theta,H")?;
        let (theta, clock) = (self.theta(), self.clock());
        for i in 0..self.len() {
            let z = self.points[i];
            writeln!(out, "{},{},{},{},{}", self.times[i], z.re, z.im, theta[i], clock[i])?;
        }
        Ok(())
    }
}

pub(crate) fn cumulative(increments: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for &d in increments {
        acc += d;
        out.push(acc);
    }
    out
}
