use super::{CheckRecord, Rule, SuiteContext};
use crate::error::Result;
use crate::levy_angular::{compute_constants, AngularLevyModel};
use crate::stable_process::{rho_series, PathBuilder, PathConfig, StableIndex};
use crate::stats::{ks_two_sample, variance};

/// Time horizon of the paths used to reach clock time 1; paths that need
/// longer are counted against the point budget like any other failure.
const PATH_HORIZON: f64 = 1e12;

pub(super) fn run(ctx: &mut SuiteContext) -> Result<()> {
    for alpha in ctx.config.alphas.clone() {
        ctx.timed(format!("variance alpha={alpha}"), |ctx| variance_three_ways(ctx, alpha))?;
        ctx.timed(format!("slope alpha={alpha}"), |ctx| variance_slope(ctx, alpha))?;
        ctx.timed(format!("cutoff alpha={alpha}"), |ctx| cutoff_stability(ctx, alpha))?;
    }
    Ok(())
}

fn replicas(ctx: &SuiteContext) -> usize {
    ctx.config.rho.replicas.unwrap_or(ctx.config.replicas)
}

fn variance_three_ways(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let rp = ctx.config.rho.clone();
    let n = replicas(ctx);
    let k = compute_constants(alpha)?.rho_variance;

    let model = AngularLevyModel::new(alpha, ctx.config.rho_cutoff)?;
    let seed = ctx.seed("simulated", alpha);
    let simulated = ctx.replicate(seed, n, |rng| Ok(model.simulate_rho(1.0, 1, rng)?[1]))?;
    let var_sim = variance(&simulated);

    let config = PathConfig {
        horizon: PATH_HORIZON,
        base_step: PATH_HORIZON,
        angle_cap: rp.angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let seed = ctx.seed("paths", alpha);
    let from_paths = ctx.replicate(seed, n, |rng| {
        let path = builder.generate_until(rng, |s| s.clock >= 1.0)?;
        Ok(rho_series(&path, &[1.0])?[0])
    })?;
    let var_path = variance(&from_paths);

    ctx.push(
        CheckRecord::new("simulated_variance", "Var ρ_1 = k(α) = ∫ φ² π̃(φ) dφ, direct simulation of ρ", Some(alpha))
            .n(simulated.len())
            .reference(k)
            .note(format!("jump cutoff ε = {}", ctx.config.rho_cutoff))
            .finish(var_sim, Rule::RelativeError, rp.variance_tolerance),
    );
    ctx.push(
        CheckRecord::new("path_variance", "Var ρ_1 = k(α), ρ_1 = θ at the time the clock reaches 1", Some(alpha))
            .n(from_paths.len())
            .reference(k)
            .finish(var_path, Rule::RelativeError, rp.variance_tolerance),
    );
    let estimates = [var_sim, var_path, k];
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..i {
            worst = worst.max((estimates[i] / estimates[j] - 1.0).abs());
        }
    }
    ctx.push(
        CheckRecord::new(
            "variance_agreement",
            "simulated, pathwise and quadrature values of Var ρ_1 agree",
            Some(alpha),
        )
        .n(n)
        .note("largest pairwise relative difference")
        .finish(worst, Rule::Below, rp.agreement_tolerance),
    );
    Ok(())
}

fn variance_slope(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let rp = ctx.config.rho.clone();
    let n = replicas(ctx);
    let k = compute_constants(alpha)?.rho_variance;
    let model = AngularLevyModel::new(alpha, ctx.config.rho_cutoff)?;
    let mut times = rp.slope_times.clone();
    times.sort_by(f64::total_cmp);
    let seed = ctx.seed("slope", alpha);
    let paths = ctx.replicate(seed, n, |rng| {
        let (mut prev, mut acc) = (0.0, 0.0);
        let mut out = Vec::with_capacity(times.len());
        for &u in &times {
            acc += model.increment(u - prev, model.epsilon(), rng)?;
            prev = u;
            out.push(acc);
        }
        Ok(out)
    })?;
    // Least squares through the origin of Var ρ_u against u.
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &u) in times.iter().enumerate() {
        let col: Vec<f64> = paths.iter().map(|p| p[j]).collect();
        num += u * variance(&col);
        den += u * u;
    }
    ctx.push(
        CheckRecord::new("variance_slope", "Var ρ_u = k(α) u for all u", Some(alpha))
            .n(paths.len())
            .reference(k)
            .note(format!("clock times {times:?}"))
            .finish(num / den, Rule::RelativeError, rp.slope_tolerance),
    );
    Ok(())
}

fn cutoff_stability(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let rp = ctx.config.rho.clone();
    let n = replicas(ctx);
    let eps = ctx.config.rho_cutoff;
    let coarse = AngularLevyModel::new(alpha, eps)?;
    let fine = AngularLevyModel::new(alpha, eps / 2.0)?;
    let seed = ctx.seed("cutoff", alpha);
    let a = ctx.replicate(seed, n, |rng| Ok(coarse.simulate_rho(1.0, 1, rng)?[1]))?;
    let seed = ctx.seed("cutoff_half", alpha);
    let b = ctx.replicate(seed, n, |rng| Ok(fine.simulate_rho(1.0, 1, rng)?[1]))?;
    let ks = ks_two_sample(&a, &b)?;
    ctx.push(
        CheckRecord::new(
            "cutoff_stability",
            "law of ρ_1 does not depend on the small-jump cutoff (ε against ε/2, two-sample KS)",
            Some(alpha),
        )
        .n(a.len())
        .finish(ks.statistic, Rule::Below, rp.cutoff_ks_threshold),
    );
    Ok(())
}
