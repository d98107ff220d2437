use super::small_time::{isotropic_point, stable_grid_exit};
use super::{CheckRecord, Rule, SuiteContext};
use crate::error::Result;
use crate::stable_process::{exit_time, ConeSpec, PathBuilder, PathConfig, StableIndex};
use crate::stats::{ks_one_sample, ks_two_sample, mean, ReferenceLaw};

pub(super) fn run(ctx: &mut SuiteContext) -> Result<()> {
    ctx.timed("small_time".into(), small_time)?;
    ctx.timed("large_time_clock".into(), large_time_clock)?;
    ctx.timed("tail_winding".into(), tail_winding)?;
    ctx.timed("cone_exit".into(), cone_exit)?;
    Ok(())
}

fn replicas(ctx: &SuiteContext) -> usize {
    ctx.config.bm.replicas.unwrap_or(ctx.config.replicas)
}

fn small_time(ctx: &mut SuiteContext) -> Result<()> {
    let bm = ctx.config.bm.clone();
    let c = bm.small_scale;
    let config =
        PathConfig { horizon: c, base_step: c / 16.0, max_points: ctx.config.max_points, ..PathConfig::default() };
    let builder = PathBuilder::new(StableIndex::brownian(), config)?;
    let seed = ctx.seed("small_time", 2.0);
    let pairs = ctx.replicate(seed, replicas(ctx), |rng| {
        let path = builder.generate(rng)?;
        let theta: f64 = path.winding_increments().iter().sum();
        let clock: f64 = path.clock_increments().iter().sum();
        Ok((theta / c.sqrt(), clock / c))
    })?;
    let (theta, clock): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let ks = ks_one_sample(&theta, &ReferenceLaw::Normal { variance: 1.0 })?;
    ctx.push(
        CheckRecord::new("winding_normal_ks", "c^(-1/2) ϑ_c → N(0, 1) as c → 0 (one-sample KS)", Some(2.0))
            .n(theta.len())
            .note(format!("c = {c}"))
            .finish(ks.statistic, Rule::Below, bm.normal_ks_threshold),
    );
    ctx.push(
        CheckRecord::new("clock_small_time", "ℋ(t)/t → 1 as t → 0", Some(2.0)).n(clock.len()).reference(1.0).finish(
            mean(&clock),
            Rule::AbsoluteError,
            bm.clock_tolerance,
        ),
    );
    Ok(())
}

fn large_time_clock(ctx: &mut SuiteContext) -> Result<()> {
    let bm = ctx.config.bm.clone();
    let log_t = bm.log_time;
    let horizon = log_t.exp();
    let config = PathConfig {
        horizon,
        base_step: horizon,
        angle_cap: bm.large_angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::brownian(), config)?;
    let seed = ctx.seed("large_time_clock", 2.0);
    let n = bm.large_replicas.unwrap_or(ctx.config.replicas);
    let scaled = ctx.replicate(seed, n, |rng| {
        let path = builder.generate(rng)?;
        Ok(4.0 * path.clock_increments().iter().sum::<f64>() / (log_t * log_t))
    })?;
    let ks = ks_one_sample(&scaled, &ReferenceLaw::BmHitting { level: 1.0 })?;
    ctx.push(
        CheckRecord::new(
            "clock_large_time_ks",
            "4ℋ(t)/(log t)² → first hitting time of 1 by Brownian motion as t → ∞ (one-sample KS)",
            Some(2.0),
        )
        .n(scaled.len())
        .note(format!("t = e^{log_t}; log-scale convergence"))
        .finish(ks.statistic, Rule::Below, bm.clock_ks_threshold),
    );
    Ok(())
}

fn tail_winding(ctx: &mut SuiteContext) -> Result<()> {
    let bm = ctx.config.bm.clone();
    let log_inv = bm.tail_log_time;
    let t0 = (-log_inv).exp();
    let config = PathConfig {
        horizon: 1.0,
        base_step: 1.0,
        angle_cap: bm.large_angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::brownian(), config)?;
    let seed = ctx.seed("tail_winding", 2.0);
    let n = bm.large_replicas.unwrap_or(ctx.config.replicas);
    let scaled = ctx.replicate(seed, n, |rng| {
        let z0 = isotropic_point(2.0, rng)? * t0.sqrt();
        let path = builder.clone().start_at(t0, z0)?.generate(rng)?;
        Ok(2.0 / log_inv * path.winding_increments().iter().sum::<f64>())
    })?;
    let inside = scaled.iter().filter(|x| x.abs() <= 1.0).count();
    ctx.push(
        CheckRecord::new(
            "tail_winding_cauchy",
            "(2/log(1/t)) ϑ_{(t,1]} → standard Cauchy as t → 0, started at 0: P(|·| ≤ 1) → 1/2",
            Some(2.0),
        )
        .n(scaled.len())
        .reference(0.5)
        .note(format!("t = e^-{log_inv}; log-scale convergence, loose tolerance"))
        .finish(inside as f64 / scaled.len() as f64, Rule::AbsoluteError, bm.cauchy_tolerance),
    );
    let ks = ks_one_sample(&scaled, &ReferenceLaw::Cauchy)?;
    ctx.push(
        CheckRecord::new(
            "tail_winding_cauchy_ks",
            "(2/log(1/t)) ϑ_{(t,1]} → standard Cauchy (one-sample KS)",
            Some(2.0),
        )
        .n(scaled.len())
        .diagnostic()
        .finish(ks.statistic, Rule::Below, ks.critical_ref),
    );
    Ok(())
}

fn cone_exit(ctx: &mut SuiteContext) -> Result<()> {
    let bm = ctx.config.bm.clone();
    let c = bm.cone_scale;
    let c2 = c * c;
    let level = c * bm.cone_level;
    let config = PathConfig {
        horizon: c2 * bm.cone_cutoff,
        base_step: c2 * bm.cone_step,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::brownian(), config)?;
    let cone = ConeSpec::symmetric(level)?;
    let n = replicas(ctx);
    let seed = ctx.seed("cone_exit", 2.0);
    let theta_side = ctx.replicate(seed, n, |rng| {
        let path = builder.generate_until(rng, |s| s.theta.abs() >= level)?;
        Ok(exit_time(path.times(), &path.theta(), &cone)?.time_or_infinity() / c2)
    })?;
    let seed = ctx.seed("cone_exit_reference", 2.0);
    let reference =
        ctx.replicate(seed, n, |rng| stable_grid_exit(2.0, 1.0, bm.cone_level, bm.cone_step, bm.cone_cutoff, rng))?;
    let ks = ks_two_sample(&theta_side, &reference)?;
    ctx.push(
        CheckRecord::new(
            "cone_exit_ks",
            "c^(-2) T^{|ϑ|}_{cx} → exit time of Brownian motion from (-x, x) as c → 0 (two-sample KS)",
            Some(2.0),
        )
        .n(theta_side.len())
        .note(format!("c = {c}, x = {}, grid step {} in units of c²", bm.cone_level, bm.cone_step))
        .finish(ks.statistic, Rule::Below, bm.cone_ks_threshold),
    );
    Ok(())
}
