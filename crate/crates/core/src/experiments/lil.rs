use super::{integral_test, BoundaryFamily, CheckRecord, IntegralVerdict, Rule, Series, SuiteContext};
use crate::error::{Error, Result};
use crate::levy_angular::AngularLevyModel;
use crate::stable_process::{rho_series, PathBuilder, PathConfig, StableIndex};

const PATH_HORIZON: f64 = 1e12;

pub(super) fn run(ctx: &mut SuiteContext) -> Result<()> {
    ctx.note(
        "the integral test is evaluated as ∫_1^∞ f(t)^(-α) dt on the boundary read as t^(1/α)(log t)^(β/α), \
         while crossings are counted as t → 0 against t^(1/α)(log 1/t)^(β/α)",
    );
    for alpha in ctx.config.alphas.clone() {
        ctx.timed(format!("verdicts alpha={alpha}"), |ctx| verdicts(ctx, alpha))?;
        ctx.timed(format!("rho_crossings alpha={alpha}"), |ctx| rho_crossings(ctx, alpha))?;
        ctx.timed(format!("theta_rho alpha={alpha}"), |ctx| theta_against_rho(ctx, alpha))?;
    }
    Ok(())
}

fn dyadic_times(depth: u32) -> Vec<f64> {
    (0..=depth).map(|n| 2f64.powi(-(n as i32))).collect()
}

/// Boundary values at `2^-n`, `n = 0..=depth`.
fn boundary(family: &BoundaryFamily, alpha: f64, depth: u32) -> Result<Vec<f64>> {
    dyadic_times(depth).into_iter().map(|t| family.value(alpha, t)).collect()
}

fn verdicts(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let betas = ctx.config.lil.verdict_betas.clone();
    let mut mismatches = 0;
    for &beta in &betas {
        let expected = if beta > 1.0 { IntegralVerdict::Converges } else { IntegralVerdict::Diverges };
        // The same boundary on [e, e^(e^5)], tabulated at log log t = 0, 1/12, ..., 5.
        let (t, f): (Vec<f64>, Vec<f64>) = (0..=60)
            .map(|i| {
                let s = (i as f64 / 12.0).exp().exp();
                (s, s.powf(1.0 / alpha) * s.ln().powf(beta / alpha))
            })
            .unzip();
        let analytic = integral_test(alpha, &BoundaryFamily::bertrand(beta)?)?;
        let numeric = integral_test(alpha, &BoundaryFamily::Tabulated { t, f })?;
        mismatches += usize::from(analytic != expected) + usize::from(numeric != expected);
    }
    ctx.push(
        CheckRecord::new(
            "integral_test_verdicts",
            "∫ (t (log t)^β)^(-1) dt converges iff β > 1, closed form and tabulated",
            Some(alpha),
        )
        .n(betas.len())
        .reference(0.0)
        .note(format!("mismatching verdicts over β ∈ {betas:?}"))
        .finish(mismatches as f64, Rule::Equal, 0.0),
    );
    Ok(())
}

/// `ρ` at `2^-n` for `n = 0..=depth`, simulated from the deepest level up.
fn simulate_dyadic<R: rand::Rng + ?Sized>(
    model: &AngularLevyModel,
    depth: u32,
    relative_cutoff: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let times = dyadic_times(depth);
    let alpha = model.alpha();
    let mut rho = vec![0.0; times.len()];
    let mut acc = 0.0;
    let mut prev = 0.0;
    for n in (0..times.len()).rev() {
        let dt = times[n] - prev;
        let cutoff = (relative_cutoff * dt.powf(1.0 / alpha)).min(1.0);
        acc += model.increment(dt, cutoff, rng)?;
        rho[n] = acc;
        prev = times[n];
    }
    Ok(rho)
}

fn crossings(values: &[f64], bound: &[f64]) -> Vec<bool> {
    values.iter().zip(bound).map(|(v, f)| v > f).collect()
}

fn rho_crossings(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let lil = ctx.config.lil.clone();
    let model = AngularLevyModel::new(alpha, ctx.config.rho_cutoff)?;
    let seed = ctx.seed("rho_crossings", alpha);
    let paths = ctx.replicate(seed, lil.paths, |rng| simulate_dyadic(&model, lil.depth, lil.relative_cutoff, rng))?;
    let n = paths.len();
    for &beta in &lil.betas {
        let family = BoundaryFamily::bertrand(beta)?;
        let bound = boundary(&family, alpha, lil.depth)?;
        let cross: Vec<Vec<bool>> = paths.iter().map(|p| crossings(p, &bound)).collect();
        let levels: Vec<f64> = (1..=lil.depth).map(f64::from).collect();
        let profile =
            (1..=lil.depth as usize).map(|l| cross.iter().filter(|c| c[l]).count() as f64 / n as f64).collect();
        ctx.report.series.push(Series {
            label: format!("rho_crossing_fraction alpha={alpha} {}", family.id()),
            x: levels,
            y: profile,
        });
        let verdict = integral_test(alpha, &family)?;
        let record = match verdict {
            IntegralVerdict::Diverges => {
                let from = lil.divergent_from as usize;
                let hit = cross.iter().filter(|c| c[from..].iter().any(|&b| b)).count();
                CheckRecord::new(
                    format!("divergent_crossings_beta_{beta}"),
                    "divergent integral: ρ_t exceeds f(t) at arbitrarily small t",
                    Some(alpha),
                )
                .n(n)
                .note(format!("fraction of paths crossing at some level n >= {from}, {}", family.id()))
                .finish(hit as f64 / n as f64, Rule::AtLeast, lil.divergent_fraction)
            }
            IntegralVerdict::Converges => {
                let from = lil.convergent_from as usize;
                let clear = cross.iter().filter(|c| !c[from..].iter().any(|&b| b)).count();
                CheckRecord::new(
                    format!("convergent_crossings_beta_{beta}"),
                    "convergent integral: ρ_t eventually stays below f(t) as t → 0",
                    Some(alpha),
                )
                .n(n)
                .note(format!("fraction of paths with no crossing at levels n >= {from}, {}", family.id()))
                .finish(clear as f64 / n as f64, Rule::AtLeast, lil.convergent_fraction)
            }
        };
        ctx.push(record);
    }
    Ok(())
}

fn theta_against_rho(ctx: &mut SuiteContext, alpha: f64) -> Result<()> {
    let lil = ctx.config.lil.clone();
    let times = dyadic_times(lil.depth);
    let config = PathConfig {
        horizon: PATH_HORIZON,
        base_step: PATH_HORIZON,
        angle_cap: lil.angle_cap,
        max_points: ctx.config.max_points,
        ..PathConfig::default()
    };
    let builder = PathBuilder::new(StableIndex::planar(alpha)?, config)?.with_nodes(&times);
    let seed = ctx.seed("theta_rho", alpha);
    let last = times[0];
    let pairs = ctx.replicate(seed, lil.paths, |rng| {
        let path = builder.generate_until(rng, |s| s.time >= last && s.clock >= last)?;
        let theta_all = path.theta();
        let theta = times
            .iter()
            .map(|&t| {
                path.times()
                    .binary_search_by(|x| x.total_cmp(&t))
                    .map(|i| theta_all[i])
                    .map_err(|_| Error::domain(format!("node {t} missing from path")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((theta, rho_series(&path, &times)?))
    })?;
    for &beta in &lil.betas {
        let family = BoundaryFamily::bertrand(beta)?;
        let bound = boundary(&family, alpha, lil.depth)?;
        let mut differ = 0usize;
        for (theta, rho) in &pairs {
            let (a, b) = (crossings(theta, &bound), crossings(rho, &bound));
            differ += (1..times.len()).filter(|&l| a[l] != b[l]).count();
        }
        let cells = pairs.len() * (times.len() - 1);
        ctx.push(
            CheckRecord::new(
                format!("theta_rho_agreement_beta_{beta}"),
                "θ_t and ρ_t cross f(t) at the same dyadic times as t → 0",
                Some(alpha),
            )
            .n(pairs.len())
            .note(format!("fraction of (path, level) cells that disagree, {}", family.id()))
            .finish(differ as f64 / cells as f64, Rule::AtMost, lil.disagreement_threshold),
        );
    }
    Ok(())
}
