use rand::Rng;
use rand_distr::Distribution;

use super::{standard_error, CheckRecord, Rule, SuiteContext};
use crate::error::Result;
use crate::levy_angular::{compute_constants, stable_scale_from_tail};
use crate::samplers::{sample_normal, PositiveStable, SymmetricStable};
use crate::stable_process::{exit_time, ComplexPoint, ConeSpec, PathBuilder, PathConfig, StableIndex};
use crate::stats::{ks_one_sample, ks_two_sample, mean, variance, ReferenceLaw};

pub(super) fn run(ctx: &mut SuiteContext) -> Result<()> {
    for alpha in ctx.config.alphas.clone() {
        ctx.timed(format!("clock alpha={alpha}"), |ctx| clock(ctx, alpha))?;
        ctx.timed(format!("winding alpha={alpha}"), |ctx| winding(ctx, alpha))?;
        ctx.timed(format!("exit_time alpha={alpha}"), |ctx| exit_times(ctx, alpha))?;
        ctx.timed(format!("tail_winding alpha={alpha}"), |ctx| tail_winding(ctx, alpha))?;
    }
    Ok(())
}

/// Point of the planar stable process started at 0, at time 1.
pub(super) fn isotropic_point<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<ComplexPoint> {
    let sd = if alpha == 2.0 { 1.0 } else { (2.0 * PositiveStable::new(alpha / 2.0)?.sample(rng)).sqrt() };
    Ok(ComplexPoint::new(sd * sample_normal(rng), sd * sample_normal(rng)))
}

/// Scale of the stable limit of `c^(-1/α) θ_c`.
fn limit_scale(alpha: f64) -> Result<f64> {
    Ok(stable_scale_from_tail(alpha, compute_constants(alpha)?.small_angle))
}

fn clock(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let st = ctx.config.small_time.clone();
    let c = st.scale;
    let config =
        PathConfig { horizon: c, base_step: c * 1e-3, max_points: ctx.config.max_points, ..PathConfig::default() };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let seed = ctx.seed("clock", alpha);
    let errors = ctx.replicate(seed, st.clock_seeds, |rng| {
        let path = builder.generate(rng)?;
        let sup = path.times().iter().zip(path.clock()).map(|(&t, h)| (h / c - t / c).abs()).fold(0.0, f64::max);
        Ok(sup)
    })?;
    let passing = errors.iter().filter(|&&e| e < st.clock_tolerance).count();
    ctx.push(
        CheckRecord::new("clock_sup_error", "sup_{x≤1} |H(cx)/c − x| → 0 as c → 0", Some(alpha))
            .n(errors.len())
            .note(format!("fraction of paths with sup error < {} at c = {c}", st.clock_tolerance))
            .finish(passing as f64 / errors.len() as f64, Rule::AtLeast, st.clock_pass_fraction),
    );
    Ok(())
}

fn winding(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let st = ctx.config.small_time.clone();
    let c = st.scale;
    let n = st.winding_replicas.unwrap_or(ctx.config.replicas);
    let config =
        PathConfig { horizon: c, base_step: c / 16.0, max_points: ctx.config.max_points, ..PathConfig::default() };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let norm = c.powf(-1.0 / alpha);
    let seed = ctx.seed("winding", alpha);
    let theta = ctx.replicate(seed, n, |rng| {
        let path = builder.generate(rng)?;
        Ok(norm * path.winding_increments().iter().sum::<f64>())
    })?;
    let sigma = limit_scale(alpha)?;
    let law = SymmetricStable::new(alpha)?;
    let reference_seed = ctx.seed("winding_reference", alpha);
    let reference = ctx.replicate(reference_seed, n, |rng| Ok(sigma * law.sample(rng)))?;
    let ks = ks_two_sample(&theta, &reference)?;
    ctx.push(
        CheckRecord::new("winding_ks", "c^(-1/α) θ_c → symmetric α-stable ζ_1 as c → 0 (two-sample KS)", Some(alpha))
            .n(theta.len())
            .note(format!("c = {c}, ζ scale {sigma:.9}"))
            .finish(ks.statistic, Rule::Below, st.winding_ks_threshold),
    );
    Ok(())
}

/// First time `|x|` reaches `level` along a symmetric stable path of scale
/// `sigma` on a grid of step `dt`, linearly interpolated; `+∞` past `cutoff`.
pub(super) fn stable_grid_exit<R: Rng + ?Sized>(
    alpha: f64,
    sigma: f64,
    level: f64,
    dt: f64,
    cutoff: f64,
    rng: &mut R,
) -> Result<f64> {
    let law = if alpha == 2.0 { None } else { Some(SymmetricStable::new(alpha)?) };
    let step_scale = sigma * dt.powf(1.0 / alpha);
    let (mut t, mut x) = (0.0, 0.0f64);
    while t < cutoff {
        let dx = step_scale
            * match &law {
                Some(l) => l.sample(rng),
                None => sample_normal(rng),
            };
        let next = x + dx;
        if next.abs() >= level {
            let target = level.copysign(next);
            let frac = ((target - x) / dx).clamp(0.0, 1.0);
            return Ok(t + frac * dt);
        }
        x = next;
        t += dt;
    }
    Ok(f64::INFINITY)
}

fn exit_times(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let st = ctx.config.small_time.clone();
    let c = st.scale;
    let n = st.exit_replicas.unwrap_or(ctx.config.replicas);
    let level = st.exit_level * c.powf(1.0 / alpha);
    let config = PathConfig {
        horizon: c * st.exit_cutoff,
        base_step: c * st.exit_step,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let cone = ConeSpec::symmetric(level)?;
    let seed = ctx.seed("exit_time", alpha);
    let theta_side = ctx.replicate(seed, n, |rng| {
        let path = builder.generate_until(rng, |s| s.theta.abs() >= level)?;
        Ok(exit_time(path.times(), &path.theta(), &cone)?.time_or_infinity() / c)
    })?;
    let sigma = limit_scale(alpha)?;
    let reference_seed = ctx.seed("exit_time_reference", alpha);
    let zeta_side = ctx.replicate(reference_seed, n, |rng| {
        stable_grid_exit(alpha, sigma, st.exit_level, st.exit_step, st.exit_cutoff, rng)
    })?;
    let ks = ks_two_sample(&theta_side, &zeta_side)?;
    ctx.push(
        CheckRecord::new("exit_time_ks", "(1/c) T^{|θ|}_{a c^(1/α)} → T^{|ζ|}_a as c → 0 (two-sample KS)", Some(alpha))
            .n(theta_side.len())
            .note(format!(
                "first passage at or above the level on both sides; grid step {} in units of c, censored beyond {}",
                st.exit_step, st.exit_cutoff
            ))
            .finish(ks.statistic, Rule::Below, st.exit_ks_threshold),
    );
    Ok(())
}

fn tail_winding(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let st = ctx.config.small_time.clone();
    let log_inv = st.tail_log_time;
    let t0 = (-log_inv).exp();
    let r = compute_constants(alpha)?.spitzer_variance;
    let config = PathConfig {
        horizon: 1.0,
        base_step: 1.0,
        angle_cap: st.angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let seed = ctx.seed("tail_winding", alpha);
    let scaled = ctx.replicate(seed, ctx.config.replicas, |rng| {
        let z0 = isotropic_point(alpha, rng)? * t0.powf(1.0 / alpha);
        let path = builder.clone().start_at(t0, z0)?.generate(rng)?;
        Ok(path.winding_increments().iter().sum::<f64>() / log_inv.sqrt())
    })?;
    let n = scaled.len();
    ctx.push(
        CheckRecord::new(
            "tail_winding_variance",
            "Var θ_{(t,1]}/√(log 1/t) → r(α) as t → 0, process started at 0",
            Some(alpha),
        )
        .n(n)
        .reference(r)
        .note(format!("t = e^-{log_inv}; log-scale convergence, loose tolerance"))
        .finish(variance(&scaled), Rule::RelativeError, st.tail_variance_tolerance),
    );
    ctx.push(
        CheckRecord::new("tail_winding_mean", "E θ_{(t,1]}/√(log 1/t) → 0 (statistic in standard errors)", Some(alpha))
            .n(n)
            .finish(mean(&scaled).abs() / standard_error(&scaled), Rule::Below, 3.0),
    );
    let ks = ks_one_sample(&scaled, &ReferenceLaw::Normal { variance: r })?;
    ctx.push(
        CheckRecord::new("tail_winding_ks", "θ_{(t,1]}/√(log 1/t) → N(0, r(α)) (one-sample KS)", Some(alpha))
            .n(n)
            .diagnostic()
            .finish(ks.statistic, Rule::Below, ks.critical_ref),
    );
    Ok(())
}
