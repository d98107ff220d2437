use super::{standard_error, CheckRecord, Rule, SuiteContext};
use crate::error::Result;
use crate::levy_angular::compute_constants;
use crate::stable_process::{
    exit_time, loses_loop_when_coarsened, winding_series, ComplexPoint, ConeSpec, PathBuilder, PathConfig, StableIndex,
};
use crate::stats::special::{bm_hitting_cdf, erf};
use crate::stats::{correlation, ks_one_sample_censored, mean, variance};

struct Replica {
    /// Final winding around each center, the origin first.
    windings: Vec<f64>,
    clock: f64,
    max_theta: f64,
    lost_loop: bool,
}

pub(super) fn run(ctx: &mut SuiteContext) -> Result<()> {
    for alpha in ctx.config.alphas.clone() {
        ctx.timed(format!("windings alpha={alpha}"), |ctx| shared_paths(ctx, alpha))?;
        ctx.timed(format!("exit_time alpha={alpha}"), |ctx| exit_times(ctx, alpha))?;
    }
    Ok(())
}

fn shared_paths(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let lt = ctx.config.large_time.clone();
    let consts = compute_constants(alpha)?;
    let (r, k_clock) = (consts.spitzer_variance, consts.clock_mean);
    let c = lt.log_time;
    let horizon = c.exp();
    let config = PathConfig {
        horizon,
        base_step: horizon,
        angle_cap: lt.angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let centers: Vec<ComplexPoint> = std::iter::once(ComplexPoint::ZERO).chain(lt.centers.iter().copied()).collect();
    let coarse_cap = (2.0 * lt.angle_cap).min(std::f64::consts::PI / 2.0);

    let seed = ctx.seed("windings", alpha);
    let replicas = ctx.replicate(seed, ctx.config.replicas, |rng| {
        let path = builder.generate(rng)?;
        let series = winding_series(&path, &centers)?;
        let max_theta = series[0].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Replica {
            windings: series.iter().map(|s| s[s.len() - 1]).collect(),
            clock: path.clock_increments().iter().sum(),
            max_theta,
            lost_loop: loses_loop_when_coarsened(&path, coarse_cap),
        })
    })?;
    let n = replicas.len();
    let scaled = |j: usize| -> Vec<f64> { replicas.iter().map(|x| x.windings[j] / c.sqrt()).collect() };

    let theta = scaled(0);
    ctx.push(
        CheckRecord::new("winding_variance", "Var θ_t/√(log t) → r(α) as t → ∞", Some(alpha))
            .n(n)
            .reference(r)
            .note(format!("t = e^{c}; log-scale convergence, loose tolerance"))
            .finish(variance(&theta), Rule::RelativeError, lt.variance_tolerance),
    );
    ctx.push(
        CheckRecord::new("winding_mean", "E θ_t/√(log t) → 0 (statistic in standard errors)", Some(alpha)).n(n).finish(
            mean(&theta).abs() / standard_error(&theta),
            Rule::Below,
            3.0,
        ),
    );

    let clock: Vec<f64> = replicas.iter().map(|x| x.clock / c).collect();
    ctx.push(
        CheckRecord::new("clock_rate", "H(t)/log t → K(α) = E|Z_1|^(-α)", Some(alpha)).n(n).reference(k_clock).finish(
            mean(&clock),
            Rule::RelativeError,
            lt.clock_tolerance,
        ),
    );

    let ratio = lt.survival_ratio;
    let level = (2.0 * r).sqrt() * ratio * c.sqrt();
    let survived = replicas.iter().filter(|x| x.max_theta < level).count();
    ctx.push(
        CheckRecord::new("survival", "P(sup_{s≤t} θ_s < b√(log t)) → erf(b/√(2r(α)))", Some(alpha))
            .n(n)
            .reference(erf(ratio))
            .note(format!("b/√(2r) = {ratio}"))
            .finish(survived as f64 / n as f64, Rule::AbsoluteError, lt.survival_tolerance),
    );

    let mut min_corr = f64::INFINITY;
    for j in 1..centers.len() {
        let w = scaled(j);
        ctx.push(
            CheckRecord::new(
                format!("center_{j}_variance"),
                format!("Var of the normalized winding around {:?} → r(α)", (centers[j].re, centers[j].im)),
                Some(alpha),
            )
            .n(n)
            .reference(r)
            .finish(variance(&w), Rule::RelativeError, lt.variance_tolerance),
        );
        for i in 0..j {
            min_corr = min_corr.min(correlation(&scaled(i), &w));
        }
    }
    if centers.len() > 1 {
        ctx.push(
            CheckRecord::new(
                "center_correlation",
                "normalized windings around distinct fixed centers become fully correlated",
                Some(alpha),
            )
            .n(n)
            .note("smallest pairwise correlation")
            .finish(min_corr, Rule::AtLeast, lt.correlation_threshold),
        );
    }

    let lost = replicas.iter().filter(|x| x.lost_loop).count();
    ctx.push(
        CheckRecord::new(
            "coarsened_loop_loss",
            "fraction of paths whose winding changes when the step cap doubles",
            Some(alpha),
        )
        .n(n)
        .diagnostic()
        .finish(lost as f64 / n as f64, Rule::Below, 0.01),
    );
    Ok(())
}

fn exit_times(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let lt = ctx.config.large_time.clone();
    let r = compute_constants(alpha)?.spitzer_variance;
    let c = lt.exit_scale;
    let level = lt.exit_level * c.sqrt();
    let horizon = (c * lt.exit_cutoff).exp();
    let config = PathConfig {
        horizon,
        base_step: horizon,
        angle_cap: lt.angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?;
    let cone = ConeSpec::one_sided(level)?;

    let seed = ctx.seed("exit_time", alpha);
    let n = lt.exit_replicas.unwrap_or(ctx.config.replicas);
    let scaled = ctx.replicate(seed, n, |rng| {
        let path = builder.generate_until(rng, |s| s.theta >= level)?;
        let exit = exit_time(path.times(), &path.theta(), &cone)?;
        Ok(if exit.censored { f64::INFINITY } else { exit.time.ln() / c })
    })?;
    let hitting_level = lt.exit_level / r.sqrt();
    let ks = ks_one_sample_censored(&scaled, |s| bm_hitting_cdf(hitting_level, s).unwrap_or(f64::NAN), lt.exit_cutoff)?;
    ctx.push(
        CheckRecord::new(
            "exit_time_ks",
            "(1/c) log T_{x√c} → first hitting time of x/√r(α) by Brownian motion",
            Some(alpha),
        )
        .n(scaled.len())
        .note(format!("c = {c}, x = {}, censored beyond {}", lt.exit_level, lt.exit_cutoff))
        .finish(ks.statistic, Rule::Below, lt.exit_ks_threshold),
    );
    Ok(())
}
