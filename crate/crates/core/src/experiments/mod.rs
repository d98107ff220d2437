//! Config-driven Monte Carlo suites. Each suite runs a set of checks per
//! stable index and returns an [`ExperimentReport`].
//!
//! Every replica draws from its own stream, derived from the config seed, a
//! per-check tag and the replica index. Results are collected in replica
//! order, so reports do not depend on the number of worker threads.

mod bm;
mod boundary;
mod config;
mod large_time;
mod lil;
mod report;
mod rho;
mod small_time;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use boundary::{integral_test, BoundaryFamily, IntegralVerdict};
pub use config::{parse_config, BmParams, ExperimentConfig, LargeTimeParams, LilParams, RhoParams, SmallTimeParams};
pub use report::{CheckBuilder, CheckRecord, ExperimentReport, Provenance, Rule, Series, Timing};

use crate::error::{Error, Result};
use crate::samplers::{derive_substream, RngSeed, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    LargeTime,
    SmallTime,
    Rho,
    Lil,
    Bm,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::LargeTime, Suite::SmallTime, Suite::Rho, Suite::Lil, Suite::Bm];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LargeTime => "large_time",
            Suite::SmallTime => "small_time",
            Suite::Rho => "rho",
            Suite::Lil => "lil",
            Suite::Bm => "bm",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// Run one suite, returning the report and the wall-clock time per check.
pub fn run_suite(suite: Suite, config: &ExperimentConfig) -> Result<(ExperimentReport, Timing)> {
    config.validate()?;
    let mut ctx = SuiteContext::new(suite, config);
    match suite {
        Suite::LargeTime => large_time::run(&mut ctx)?,
        Suite::SmallTime => small_time::run(&mut ctx)?,
        Suite::Rho => rho::run(&mut ctx)?,
        Suite::Lil => lil::run(&mut ctx)?,
        Suite::Bm => bm::run(&mut ctx)?,
    }
    Ok((ctx.report, ctx.timing))
}

/// Windings, clock, exit times, survival and multi-center windings at large
/// times.
pub fn run_large_time_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_suite(Suite::LargeTime, config).map(|(r, _)| r)
}

/// Clock, windings and cone exits at small times, and windings over `(t, 1]`.
pub fn run_small_time_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_suite(Suite::SmallTime, config).map(|(r, _)| r)
}

/// Variance of the time-changed angle measured three ways.
pub fn run_rho_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_suite(Suite::Rho, config).map(|(r, _)| r)
}

/// Boundary crossings of `ρ` and `θ` along dyadic times.
pub fn run_lil_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_suite(Suite::Lil, config).map(|(r, _)| r)
}

/// Planar Brownian motion: small-time windings and clock, large-time clock,
/// windings over `(t, 1]` and cone exits.
pub fn run_bm_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_suite(Suite::Bm, config).map(|(r, _)| r)
}

/// State shared by the checks of one suite run.
pub(crate) struct SuiteContext<'a> {
    pub config: &'a ExperimentConfig,
    pub report: ExperimentReport,
    pub timing: Timing,
    suite: Suite,
}

impl<'a> SuiteContext<'a> {
    fn new(suite: Suite, config: &'a ExperimentConfig) -> Self {
        SuiteContext {
            config,
            report: ExperimentReport::new(suite.name(), config),
            timing: Timing { suite: suite.name().to_string(), seconds: Vec::new() },
            suite,
        }
    }

    /// Seed of one check; distinct checks and indices get unrelated streams.
    pub fn seed(&self, check: &str, alpha: f64) -> RngSeed {
        let tag = format!("{}/{check}/{alpha}", self.suite.name());
        RngSeed::with_stream(self.config.seed, fnv1a(tag.as_bytes()))
    }

    /// Run `f` on `n` replicas in parallel, in replica order. Replicas whose
    /// path exceeds the point budget are dropped and counted; other errors
    /// abort the suite.
    pub fn replicate<T, F>(&mut self, seed: RngSeed, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut Stream) -> Result<T> + Sync,
    {
        let results: Vec<Result<T>> =
            (0..n as u64).into_par_iter().map(|i| f(&mut derive_substream(seed, i))).collect();
        let mut kept = Vec::with_capacity(n);
        for r in results {
            match r {
                Ok(v) => kept.push(v),
                Err(Error::PathBudget { .. }) => self.report.failed_replicas += 1,
                Err(e) => return Err(e),
            }
        }
        if kept.len() < 2 {
            return Err(Error::Config(format!("fewer than two of {n} replicas stayed within the point budget")));
        }
        Ok(kept)
    }

    /// Run a group of checks and record its wall-clock time.
    pub fn timed<T>(&mut self, id: String, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self)?;
        self.timing.record(id, start.elapsed());
        Ok(out)
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.report.checks.push(record);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.report.notes.push(note.into());
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Standard error of the mean.
pub(crate) fn standard_error(values: &[f64]) -> f64 {
    (crate::stats::variance(values) / values.len() as f64).sqrt()
}
