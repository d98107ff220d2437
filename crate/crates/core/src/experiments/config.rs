use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::stable_process::ComplexPoint;

/// Full experiment configuration. Every field has a default, so `{}` is a
/// valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stable indices, each in `(0, 2)`.
    pub alphas: Vec<f64>,
    /// Default number of replicas per check; suites may override per check.
    pub replicas: usize,
    pub seed: u64,
    /// Upper bound on the points of a single path; replicas that exceed it
    /// are counted as failed, not fatal.
    pub max_points: usize,
    /// Jump cutoff ε of the direct simulator for ρ.
    pub rho_cutoff: f64,
    pub large_time: LargeTimeParams,
    pub small_time: SmallTimeParams,
    pub rho: RhoParams,
    pub lil: LilParams,
    pub bm: BmParams,
    /// Where reports go; the command line `--out` and `WINDINGS_OUT_DIR`
    /// take precedence.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alphas: vec![1.0],
            replicas: 2000,
            seed: 1,
            max_points: 5_000_000,
            rho_cutoff: 1e-3,
            large_time: LargeTimeParams::default(),
            small_time: SmallTimeParams::default(),
            rho: RhoParams::default(),
            lil: LilParams::default(),
            bm: BmParams::default(),
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LargeTimeParams {
    /// `log t` for the winding, clock and survival checks.
    pub log_time: f64,
    pub angle_cap: f64,
    /// Relative tolerance on the variance of `θ_t / √log t` against `r(α)`.
    pub variance_tolerance: f64,
    /// Relative tolerance on the mean of `H(t) / log t` against `K(α)`.
    pub clock_tolerance: f64,
    /// `b / √(2 r(α))` for the survival check; 1 compares against erf(1).
    pub survival_ratio: f64,
    pub survival_tolerance: f64,
    /// Scale `c` and level `x` of the exit check `(1/c) log T_{x√c}`.
    pub exit_scale: f64,
    pub exit_level: f64,
    /// Exit times beyond `exp(c · exit_cutoff)` are censored.
    pub exit_cutoff: f64,
    pub exit_replicas: Option<usize>,
    pub exit_ks_threshold: f64,
    /// Extra centers for the joint winding check; the origin is always used.
    pub centers: Vec<ComplexPoint>,
    pub correlation_threshold: f64,
}

impl Default for LargeTimeParams {
    fn default() -> Self {
        LargeTimeParams {
            log_time: 12.0,
            angle_cap: PI / 128.0,
            variance_tolerance: 0.25,
            clock_tolerance: 0.2,
            survival_ratio: 1.0,
            survival_tolerance: 0.10,
            exit_scale: 12.0,
            exit_level: 1.0,
            exit_cutoff: 20.0,
            exit_replicas: None,
            exit_ks_threshold: 0.15,
            centers: vec![ComplexPoint::new(-2.0, 0.0), ComplexPoint::new(0.0, 2.0)],
            correlation_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallTimeParams {
    /// Time scale `c` of the small-time limits.
    pub scale: f64,
    /// Seeds for the clock checks.
    pub clock_seeds: usize,
    pub clock_tolerance: f64,
    pub clock_pass_fraction: f64,
    pub winding_replicas: Option<usize>,
    pub winding_ks_threshold: f64,
    /// Cone half-width `a` in units of `c^(1/α)`.
    pub exit_level: f64,
    /// Step of the grid, in units of `c`, shared by both sides of the exit check.
    pub exit_step: f64,
    /// Exit times beyond this (in units of `c`) are censored.
    pub exit_cutoff: f64,
    pub exit_replicas: Option<usize>,
    pub exit_ks_threshold: f64,
    /// `log(1/t)` for the windings over `(t, 1]`.
    pub tail_log_time: f64,
    pub tail_variance_tolerance: f64,
    pub angle_cap: f64,
}

impl Default for SmallTimeParams {
    fn default() -> Self {
        SmallTimeParams {
            scale: 1e-4,
            clock_seeds: 100,
            clock_tolerance: 0.05,
            clock_pass_fraction: 0.95,
            winding_replicas: Some(5000),
            winding_ks_threshold: 0.05,
            exit_level: 1.0,
            exit_step: 1e-4,
            exit_cutoff: 50.0,
            exit_replicas: Some(3000),
            exit_ks_threshold: 0.08,
            tail_log_time: 12.0,
            tail_variance_tolerance: 0.25,
            angle_cap: PI / 128.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RhoParams {
    pub replicas: Option<usize>,
    /// Relative tolerance of each variance estimate against `k(α)`.
    pub variance_tolerance: f64,
    /// Relative tolerance between any two of the three variance estimates.
    pub agreement_tolerance: f64,
    /// Clock times for the variance regression.
    pub slope_times: Vec<f64>,
    pub slope_tolerance: f64,
    pub cutoff_ks_threshold: f64,
    pub angle_cap: f64,
}

impl Default for RhoParams {
    fn default() -> Self {
        RhoParams {
            replicas: Some(10_000),
            variance_tolerance: 0.05,
            agreement_tolerance: 0.07,
            slope_times: vec![0.25, 0.5, 1.0, 2.0],
            slope_tolerance: 0.05,
            cutoff_ks_threshold: 0.025,
            angle_cap: PI / 256.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LilParams {
    /// Bertrand exponents `β` of the boundary families.
    pub betas: Vec<f64>,
    /// Deepest dyadic level `n` (times `2^-n`).
    pub depth: u32,
    pub paths: usize,
    /// Cutoff of the ρ simulator as a fraction of `t^(1/α)` at each level.
    pub relative_cutoff: f64,
    /// Divergent families must cross at some level `>= divergent_from` ...
    pub divergent_from: u32,
    /// ... in at least this fraction of paths.
    pub divergent_fraction: f64,
    /// Convergent families must not cross at any level `>= convergent_from` ...
    pub convergent_from: u32,
    /// ... in at least this fraction of paths.
    pub convergent_fraction: f64,
    /// Largest tolerated fraction of (path, level) cells in which θ and ρ
    /// disagree about crossing.
    pub disagreement_threshold: f64,
    /// Exponents whose integral-test verdict is checked.
    pub verdict_betas: Vec<f64>,
    /// Step cap of the planar paths used for the θ against ρ comparison.
    pub angle_cap: f64,
}

impl Default for LilParams {
    fn default() -> Self {
        LilParams {
            betas: vec![0.0, 3.0],
            depth: 30,
            paths: 100,
            relative_cutoff: 0.01,
            divergent_from: 20,
            divergent_fraction: 0.5,
            convergent_from: 15,
            convergent_fraction: 0.95,
            disagreement_threshold: 0.10,
            verdict_betas: vec![0.0, 0.5, 1.0, 1.5, 2.0, 3.0],
            angle_cap: PI / 64.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmParams {
    pub replicas: Option<usize>,
    /// Time scale of the small-time winding and clock checks.
    pub small_scale: f64,
    pub normal_ks_threshold: f64,
    pub clock_tolerance: f64,
    /// `log t` for the large-time clock check.
    pub log_time: f64,
    /// Replicas and step cap of the large-time clock check and of the
    /// windings over `(t, 1]`; both need many steps near the origin.
    pub large_replicas: Option<usize>,
    pub large_angle_cap: f64,
    pub clock_ks_threshold: f64,
    /// `log(1/t)` for the windings over `(t, 1]`.
    pub tail_log_time: f64,
    pub cauchy_tolerance: f64,
    /// Scale `c` and level `x` of the cone exit check `c^-2 T_{cx}`.
    pub cone_scale: f64,
    pub cone_level: f64,
    /// Grid step, in units of `c²`, shared by both sides of the exit check.
    pub cone_step: f64,
    pub cone_cutoff: f64,
    pub cone_ks_threshold: f64,
    pub angle_cap: f64,
}

impl Default for BmParams {
    fn default() -> Self {
        BmParams {
            replicas: Some(5000),
            small_scale: 1e-4,
            normal_ks_threshold: 0.03,
            clock_tolerance: 0.02,
            log_time: 12.0,
            large_replicas: Some(2000),
            large_angle_cap: PI / 16.0,
            clock_ks_threshold: 0.05,
            tail_log_time: 12.0,
            cauchy_tolerance: 0.10,
            cone_scale: 1e-2,
            cone_level: 1.0,
            cone_step: 1e-4,
            cone_cutoff: 20.0,
            cone_ks_threshold: 0.08,
            angle_cap: PI / 64.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Config("alphas must not be empty".into()));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 2.0) {
                return Err(Error::Range { value: a, low: 0.0, high: 2.0 });
            }
        }
        if self.replicas < 1 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if self.max_points < 2 {
            return Err(Error::Config("max_points must be at least 2".into()));
        }
        if !(self.rho_cutoff > 0.0 && self.rho_cutoff < PI) {
            return Err(Error::Config(format!("rho_cutoff must lie in (0, π), got {}", self.rho_cutoff)));
        }
        let lt = &self.large_time;
        let st = &self.small_time;
        let bm = &self.bm;
        let positive = [
            ("large_time.log_time", lt.log_time),
            ("large_time.exit_scale", lt.exit_scale),
            ("large_time.exit_level", lt.exit_level),
            ("large_time.exit_cutoff", lt.exit_cutoff),
            ("large_time.survival_ratio", lt.survival_ratio),
            ("small_time.scale", st.scale),
            ("small_time.exit_level", st.exit_level),
            ("small_time.exit_step", st.exit_step),
            ("small_time.exit_cutoff", st.exit_cutoff),
            ("small_time.tail_log_time", st.tail_log_time),
            ("lil.relative_cutoff", self.lil.relative_cutoff),
            ("bm.small_scale", bm.small_scale),
            ("bm.log_time", bm.log_time),
            ("bm.tail_log_time", bm.tail_log_time),
            ("bm.cone_scale", bm.cone_scale),
            ("bm.cone_level", bm.cone_level),
            ("bm.cone_step", bm.cone_step),
            ("bm.cone_cutoff", bm.cone_cutoff),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, cap) in [
            ("large_time.angle_cap", lt.angle_cap),
            ("small_time.angle_cap", st.angle_cap),
            ("rho.angle_cap", self.rho.angle_cap),
            ("lil.angle_cap", self.lil.angle_cap),
            ("bm.angle_cap", bm.angle_cap),
            ("bm.large_angle_cap", bm.large_angle_cap),
        ] {
            if !(cap > 0.0 && cap < PI) {
                return Err(Error::Config(format!("{name} must lie in (0, π), got {cap}")));
            }
        }
        if self.rho.slope_times.len() < 2 || self.rho.slope_times.iter().any(|&u| !(u > 0.0)) {
            return Err(Error::Config("rho.slope_times needs at least two positive times".into()));
        }
        if self.lil.depth < 2 || self.lil.depth > 60 {
            return Err(Error::Config(format!("lil.depth must lie in [2, 60], got {}", self.lil.depth)));
        }
        if self.lil.betas.iter().chain(&self.lil.verdict_betas).any(|&b| !(b >= 0.0 && b.is_finite())) {
            return Err(Error::Config("boundary exponents must be finite and >= 0".into()));
        }
        if lt.centers.iter().any(|c| !c.is_finite() || *c == ComplexPoint::ZERO || *c == ComplexPoint::ONE) {
            return Err(Error::Config("extra centers must be finite and differ from 0 and 1".into()));
        }
        for n in [
            self.large_time.exit_replicas,
            st.winding_replicas,
            st.exit_replicas,
            self.rho.replicas,
            bm.replicas,
            bm.large_replicas,
        ]
        .into_iter()
        .flatten()
        .chain([st.clock_seeds, self.lil.paths])
        {
            if n < 2 {
                return Err(Error::Config("per-check replica counts must be at least 2".into()));
            }
        }
        Ok(())
    }

    /// Canonical JSON of the effective config.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Hex SHA-256 of the compact JSON of the effective config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config always serializes");
        Sha256::digest(json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// Read, default-fill and validate a JSON config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(r#"{"alphas": [1.0], "replicas": 100, "seed": 42}"#).unwrap();
        assert_eq!(c.replicas, 100);
        assert_eq!(c.seed, 42);
        assert_eq!(c.large_time, LargeTimeParams::default());
        assert_eq!(c.rho_cutoff, 1e-3);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(matches!(ExperimentConfig::from_json(r#"{"alphas": [2.5]}"#), Err(Error::Range { .. })));
        assert!(matches!(ExperimentConfig::from_json(r#"{"alphas": []}"#), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_json(r#"{"replicas": 0}"#), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_json(r#"{"nonsense": 1}"#), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_json("{"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_json(r#"{"small_time": {"angle_cap": 4.0}}"#), Err(Error::Config(_))));
        assert!(matches!(parse_config(Path::new("/nonexistent/c.json")), Err(Error::Io { .. })));
    }

    #[test]
    fn round_trip_and_hash() {
        let c = ExperimentConfig::from_json(r#"{"alphas": [0.5, 1.5], "seed": 7, "lil": {"paths": 10}}"#).unwrap();
        let again = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
        assert_eq!(c.hash().len(), 64);
        let other = ExperimentConfig { seed: 8, ..c.clone() };
        assert_ne!(c.hash(), other.hash());
    }
}
