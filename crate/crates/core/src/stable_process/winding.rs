use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ComplexPoint, PlanarPath};
use crate::error::{Error, Result};

/// Principal argument of `(to - center) / (from - center)`, in `(-π, π]`.
pub fn principal_arg_ratio(from: ComplexPoint, to: ComplexPoint, center: ComplexPoint) -> f64 {
    let (a, b) = (from - center, to - center);
    // b * conj(a)
    let re = b.re * a.re + b.im * a.im;
    let im = b.im * a.re - b.re * a.im;
    if im == 0.0 && re < 0.0 {
        return PI;
    }
    let d = im.atan2(re);
    if d == -PI {
        PI
    } else {
        d
    }
}

/// Winding around each center at every node of the path, starting at 0.
pub fn winding_series(path: &PlanarPath, centers: &[ComplexPoint]) -> Result<Vec<Vec<f64>>> {
    centers
        .iter()
        .map(|&c| {
            if c == ComplexPoint::ZERO {
                return Ok(path.theta());
            }
            if let Some(z) = path.points().iter().find(|&&z| z == c) {
                return Err(Error::DegenerateGeometry(format!("center {c:?} lies on the path at {z:?}")));
            }
            let mut out = Vec::with_capacity(path.len());
            let mut acc = 0.0;
            out.push(0.0);
            for w in path.points().windows(2) {
                acc += principal_arg_ratio(w[0], w[1], c);
                out.push(acc);
            }
            Ok(out)
        })
        .collect()
}

/// The clock `H` at every node (trapezoid rule on the nodes).
pub fn clock_series(path: &PlanarPath) -> Vec<f64> {
    path.clock()
}

/// `A(u)`: the time at which the clock reaches `u`, by linear interpolation
/// between nodes. `times` and `clock` are parallel series.
pub fn inverse_clock(times: &[f64], clock: &[f64], u: f64) -> Result<f64> {
    let (i, frac) = locate(clock, u)?;
    if frac == 0.0 {
        return Ok(times[i]);
    }
    Ok(times[i - 1] + frac * (times[i] - times[i - 1]))
}

/// Index `i` and fraction such that `u = clock[i-1] + frac (clock[i] - clock[i-1])`.
fn locate(clock: &[f64], u: f64) -> Result<(usize, f64)> {
    let high = *clock.last().ok_or_else(|| Error::domain("empty clock series"))?;
    if !(u >= clock[0] && u <= high) {
        return Err(Error::Range { value: u, low: clock[0], high });
    }
    let i = clock.partition_point(|&h| h < u);
    if clock[i] == u || i == 0 {
        return Ok((i, 0.0));
    }
    Ok((i, (u - clock[i - 1]) / (clock[i] - clock[i - 1])))
}

/// `ρ_u = θ_{A(u)}` on the given grid, interpolating the winding linearly
/// inside the step that contains `A(u)`.
pub fn rho_series(path: &PlanarPath, u_grid: &[f64]) -> Result<Vec<f64>> {
    let (theta, clock) = (path.theta(), path.clock());
    u_grid
        .iter()
        .map(|&u| {
            let (i, frac) = locate(&clock, u)?;
            Ok(if frac == 0.0 { theta[i] } else { theta[i - 1] + frac * (theta[i] - theta[i - 1]) })
        })
        .collect()
}

/// Winding around 0 of the polygon through the subset of nodes that a
/// coarser step rule (`angle_cap = coarse_cap`) would have kept: from node
/// `k`, jump to the last node within `(coarse_cap |z_k|)^α` of `t_k`.
///
/// The difference from the full winding is a multiple of 2π; a nonzero
/// multiple is a loop that the coarser grid would have missed.
pub fn coarsened_winding(path: &PlanarPath, coarse_cap: f64) -> f64 {
    let a = path.alpha().value();
    let (t, z) = (path.times(), path.points());
    let (mut k, mut acc) = (0, 0.0);
    while k + 1 < t.len() {
        let reach = t[k] + (coarse_cap * z[k].norm()).powf(a);
        let mut j = k + 1;
        while j + 1 < t.len() && t[j + 1] <= reach {
            j += 1;
        }
        acc += principal_arg_ratio(z[k], z[j], ComplexPoint::ZERO);
        k = j;
    }
    acc
}

/// Whether the winding at the end of the path changes by a nonzero multiple
/// of 2π when the grid is coarsened to `coarse_cap`.
pub fn loses_loop_when_coarsened(path: &PlanarPath, coarse_cap: f64) -> bool {
    let full = path.winding_increments().iter().sum::<f64>();
    ((full - coarsened_winding(path, coarse_cap)) / (2.0 * PI)).round() != 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeMode {
    /// Exit once `θ >= c`.
    OneSided,
    /// Exit once `|θ| >= c`.
    Symmetric,
    /// Exit once `θ` leaves `(-d, c)`.
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub mode: ConeMode,
    pub upper: f64,
    pub lower: f64,
}

impl ConeSpec {
    pub fn one_sided(c: f64) -> Result<Self> {
        ConeSpec { mode: ConeMode::OneSided, upper: c, lower: f64::INFINITY }.validated()
    }

    pub fn symmetric(c: f64) -> Result<Self> {
        ConeSpec { mode: ConeMode::Symmetric, upper: c, lower: c }.validated()
    }

    pub fn two_sided(d: f64, c: f64) -> Result<Self> {
        ConeSpec { mode: ConeMode::TwoSided, upper: c, lower: d }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.upper > 0.0 && self.lower > 0.0) {
            return Err(Error::domain(format!(
                "cone levels must be positive, got c = {}, d = {}",
                self.upper, self.lower
            )));
        }
        Ok(self)
    }

    fn lower_level(&self) -> f64 {
        match self.mode {
            ConeMode::OneSided => f64::NEG_INFINITY,
            ConeMode::Symmetric => -self.upper,
            ConeMode::TwoSided => -self.lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitTimeRecord {
    /// Exit time, interpolated inside the crossing step; the last time of
    /// the series when censored.
    pub time: f64,
    /// First node at which the winding is outside the cone.
    pub grid_time: f64,
    pub censored: bool,
    /// Winding at that node (at the last node when censored).
    pub crossing_value: f64,
}

impl ExitTimeRecord {
    /// Exit time with censored records mapped to `+∞`.
    pub fn time_or_infinity(&self) -> f64 {
        if self.censored {
            f64::INFINITY
        } else {
            self.time
        }
    }
}

/// First exit of `theta` from the cone.
pub fn exit_time(times: &[f64], theta: &[f64], cone: &ConeSpec) -> Result<ExitTimeRecord> {
    if times.is_empty() || times.len() != theta.len() {
        return Err(Error::domain("times and winding series must be non-empty and of equal length"));
    }
    cone.validated()?;
    let (up, low) = (cone.upper, cone.lower_level());
    match theta.iter().position(|&x| x >= up || x <= low) {
        None => {
            let last = times.len() - 1;
            Ok(ExitTimeRecord {
                time: times[last],
                grid_time: times[last],
                censored: true,
                crossing_value: theta[last],
            })
        }
        Some(0) => {
            Ok(ExitTimeRecord { time: times[0], grid_time: times[0], censored: false, crossing_value: theta[0] })
        }
        Some(i) => {
            let level = if theta[i] >= up { up } else { low };
            let frac = (level - theta[i - 1]) / (theta[i] - theta[i - 1]);
            let time = times[i - 1] + frac.clamp(0.0, 1.0) * (times[i] - times[i - 1]);
            Ok(ExitTimeRecord { time, grid_time: times[i], censored: false, crossing_value: theta[i] })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable_process::StableIndex;

    fn unit() -> StableIndex {
        StableIndex::planar(1.0).unwrap()
    }

    #[test]
    fn boundary_conventions() {
        let o = ComplexPoint::ZERO;
        assert_eq!(principal_arg_ratio(ComplexPoint::ONE, ComplexPoint::new(-1.0, 0.0), o), PI);
        assert_eq!(principal_arg_ratio(ComplexPoint::ONE, ComplexPoint::new(-1.0, -0.0), o), PI);
        assert_eq!(principal_arg_ratio(ComplexPoint::ONE, ComplexPoint::new(2.0, 0.0), o), 0.0);
        assert_eq!(ComplexPoint::new(-1.0, -0.0).arg(), PI);
    }

    #[test]
    fn square_loop_winds_once() {
        let pts = vec![
            ComplexPoint::new(1.0, 0.0),
            ComplexPoint::new(0.0, 1.0),
            ComplexPoint::new(-1.0, 0.0),
            ComplexPoint::new(0.0, -1.0),
            ComplexPoint::new(1.0, 0.0),
        ];
        let path = PlanarPath::from_points(unit(), vec![0.0, 1.0, 2.0, 3.0, 4.0], pts).unwrap();
        let theta =
            winding_series(&path, &[ComplexPoint::ZERO, ComplexPoint::new(0.1, 0.2), ComplexPoint::new(5.0, 0.0)])
                .unwrap();
        assert!((theta[0][4] - 2.0 * PI).abs() < 1e-15);
        assert!((theta[1][4] - 2.0 * PI).abs() < 1e-12);
        assert!(theta[2][4].abs() < 1e-12);
        assert!(matches!(winding_series(&path, &[ComplexPoint::new(0.0, 1.0)]), Err(Error::DegenerateGeometry(_))));
    }

    fn exp_radius_path() -> PlanarPath {
        let n = 4000;
        let times: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
        let points = times.iter().map(|&s| ComplexPoint::from_polar(s.exp(), 3.0 * s)).collect();
        PlanarPath::from_points(unit(), times, points).unwrap()
    }

    #[test]
    fn clock_of_synthetic_paths() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let points = times.iter().map(|&s| ComplexPoint::from_polar(1.0, s)).collect();
        let circle = PlanarPath::from_points(unit(), times.clone(), points).unwrap();
        let h = clock_series(&circle);
        for (a, b) in h.iter().zip(&times) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((inverse_clock(&times, &h, 1.234).unwrap() - 1.234).abs() < 1e-12);
        assert_eq!(rho_series(&circle, &[0.0, 1.0]).unwrap()[1], circle.theta()[20]);

        let path = exp_radius_path();
        let h = clock_series(&path);
        for (&t, &v) in path.times().iter().zip(&h) {
            assert!((v - (1.0 - (-t).exp())).abs() < 1e-4);
        }
        for u in [0.1, 0.5, 0.8] {
            let a = inverse_clock(path.times(), &h, u).unwrap();
            assert!((a + (1.0 - u).ln()).abs() < 1e-4);
        }
        assert!(matches!(inverse_clock(path.times(), &h, 0.99), Err(Error::Range { .. })));
        assert!(matches!(inverse_clock(path.times(), &h, -0.1), Err(Error::Range { .. })));
    }

    #[test]
    fn exit_time_cases() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let theta: Vec<f64> = times.iter().map(|t| 2.0 * PI * t).collect();
        let rec = exit_time(&times, &theta, &ConeSpec::one_sided(PI).unwrap()).unwrap();
        assert!((rec.time - 0.5).abs() < 1e-15);
        assert!(!rec.censored);

        let flat: Vec<f64> = times.iter().map(|t| 0.4 * (10.0 * t).sin()).collect();
        let rec = exit_time(&times, &flat, &ConeSpec::symmetric(1.0).unwrap()).unwrap();
        assert!(rec.censored);
        assert_eq!(rec.time, 1.0);
        assert_eq!(rec.time_or_infinity(), f64::INFINITY);

        let down: Vec<f64> = times.iter().map(|t| -3.0 * t).collect();
        let rec = exit_time(&times, &down, &ConeSpec::two_sided(1.5, 1.0).unwrap()).unwrap();
        assert!((rec.time - 0.5).abs() < 1e-15);
        assert!(ConeSpec::two_sided(0.0, 1.0).is_err());
    }
}
