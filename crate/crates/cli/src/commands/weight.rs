use anyhow::Result;
use clap::{Args, Subcommand};
use gtlab_core::gowers::{GowersEvaluator, GowersOrder, SpectralNorm};
use gtlab_core::weight::{
    form_family_registry, mean_nu_divisor_oracle, verify_correlations, verify_linear_forms, FormLimits,
};
use gtlab_core::{GridFunction, GtError};

use super::{weight, Context};
use crate::cache::WeightTables;
use crate::output::{num, Table, Verdicts};
use crate::{Outcome, WeightParams};

#[derive(Subcommand, Debug)]
pub enum WeightCommand {
    /// Build ν and f (or read them from the cache); print E(ν), E(f), c.
    Build {
        #[arg(long, default_value_t = 10_007)]
        n: u64,
        #[command(flatten)]
        params: WeightParams,
    },
    /// E(ν) against 1 and against the divisor-sum oracle, across N.
    VerifyMean {
        #[arg(long = "n", default_values_t = [10_007u64, 100_003])]
        ns: Vec<u64>,
        #[command(flatten)]
        params: WeightParams,
        /// Accepted range for E(ν) at the smallest N.
        #[arg(long, default_value_t = 0.65)]
        low: f64,
        #[arg(long, default_value_t = 1.35)]
        high: f64,
    },
    /// Linear-forms average of ν for a registered family.
    VerifyForms {
        /// identity, ap or cube.
        #[arg(long, default_value = "ap")]
        family: String,
        #[arg(long = "n", default_values_t = [10_007u64])]
        ns: Vec<u64>,
        #[command(flatten)]
        params: WeightParams,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allowed distance from 1 when it exceeds 4 standard errors.
        #[arg(long, default_value_t = 0.3)]
        tolerance: f64,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Correlation condition on random q-tuples of shifts.
    VerifyCorr {
        #[arg(long = "n", default_values_t = [10_007u64])]
        ns: Vec<u64>,
        #[command(flatten)]
        params: WeightParams,
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct LimitArgs {
    /// Most forms in a family.
    #[arg(long, default_value_t = FormLimits::default().m0)]
    m0: usize,
    /// Most variables in a family.
    #[arg(long = "vars", default_value_t = FormLimits::default().t)]
    t: usize,
    /// Largest coefficient magnitude.
    #[arg(long, default_value_t = FormLimits::default().l_bound)]
    l_bound: i64,
    /// Largest correlation tuple.
    #[arg(long, default_value_t = FormLimits::default().q0)]
    q0: usize,
}

impl LimitArgs {
    fn limits(self) -> FormLimits {
        FormLimits {
            m0: self.m0,
            t: self.t,
            l_bound: self.l_bound,
            q0: self.q0,
        }
    }
}

pub fn run(ctx: &Context, cmd: WeightCommand) -> Result<Outcome> {
    match cmd {
        WeightCommand::Build { n, params } => build(ctx, n, params),
        WeightCommand::VerifyMean { ns, params, low, high } => verify_mean(ctx, &ns, params, low, high),
        WeightCommand::VerifyForms {
            family,
            ns,
            params,
            samples,
            seed,
            tolerance,
            limits,
        } => verify_forms(ctx, &family, &ns, params, samples, seed, tolerance, limits.limits()),
        WeightCommand::VerifyCorr {
            ns,
            params,
            q,
            trials,
            seed,
            limits,
        } => verify_corr(ctx, &ns, params, q, trials, seed, limits.limits()),
    }
}

fn build(ctx: &Context, n: u64, params: WeightParams) -> Result<Outcome> {
    let t = weight(ctx, n, params)?;
    let w = &t.recipe.wtrick;
    let mut table = Table::new(
        ctx.out(),
        &["k", "N", "alpha", "w", "W", "R", "b", "c", "mean_nu", "mean_f", "cache"],
    )?;
    table.row([
        w.k.to_string(),
        w.n.to_string(),
        num(w.alpha),
        num(w.w),
        w.big_w.to_string(),
        num(w.r),
        w.b.to_string(),
        num(t.c),
        num(t.nu.expectation()),
        num(t.f.expectation()),
        t.origin.label().to_string(),
    ])?;
    table.finish()?;
    Ok(Outcome::Done)
}

fn dominated(t: &WeightTables) -> bool {
    t.f.values()
        .iter()
        .zip(t.nu.values())
        .all(|(&f, &nu)| 0.0 <= f && f <= t.c * nu)
}

/// `⟦ν − 1⟧₂`.
pub fn nu_deviation(nu: &GridFunction) -> Result<f64> {
    let centered = nu.map(|v| v - 1.0)?;
    Ok(SpectralNorm::default().norm(&centered, GowersOrder::new(2)?)?)
}

fn verify_mean(ctx: &Context, ns: &[u64], params: WeightParams, low: f64, high: f64) -> Result<Outcome> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut table = Table::new(
        ctx.out(),
        &["k", "N", "W", "R", "b", "mean_nu", "oracle", "nu_minus_one_u2", "mean_f", "c"],
    )?;
    let mut verdicts = Verdicts::default();
    let mut previous: Option<(u64, f64, f64)> = None;
    for &n in &ns {
        let t = weight(ctx, n, params)?;
        let w = t.recipe.wtrick;
        let mean = t.nu.expectation();
        let deviation = nu_deviation(&t.nu)?;
        let oracle = match mean_nu_divisor_oracle(&t.recipe, &t.sieve) {
            Ok(v) => Some(v),
            Err(GtError::Infeasible { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        table.row([
            w.k.to_string(),
            w.n.to_string(),
            w.big_w.to_string(),
            num(w.r),
            w.b.to_string(),
            num(mean),
            oracle.map(num).unwrap_or_default(),
            num(deviation),
            num(t.f.expectation()),
            num(t.c),
        ])?;

        let n = w.n;
        verdicts.check(&format!("domination N={n}"), dominated(&t), format!("0 <= f <= c*nu with c = {}", t.c));
        let mean_f = t.f.expectation();
        verdicts.check(&format!("mean_f N={n}"), mean_f > 0.0, format!("E(f) = {mean_f}"));
        if let Some(o) = oracle {
            let budget = w.r * w.r / n as f64 + 0.05;
            verdicts.check(
                &format!("oracle N={n}"),
                (o - mean).abs() <= budget,
                format!("|{o} - {mean}| against {budget}"),
            );
        }
        match previous {
            None => verdicts.check(
                &format!("mean_nu N={n}"),
                (low..=high).contains(&mean),
                format!("E(nu) = {mean} in [{low}, {high}]"),
            ),
            Some((m, prev_mean, prev_dev)) => {
                verdicts.check(
                    &format!("mean_nu trend N={m}->{n}"),
                    (mean - 1.0).abs() < (prev_mean - 1.0).abs(),
                    format!("|E(nu) - 1|: {} -> {}", (prev_mean - 1.0).abs(), (mean - 1.0).abs()),
                );
                verdicts.check(
                    &format!("nu-1 U2 trend N={m}->{n}"),
                    deviation < prev_dev,
                    format!("{prev_dev} -> {deviation}"),
                );
            }
        }
        previous = Some((n, mean, deviation));
    }
    table.finish()?;
    Ok(Outcome::Verdict(verdicts.passed()))
}

#[allow(clippy::too_many_arguments)]
fn verify_forms(
    ctx: &Context,
    family: &str,
    ns: &[u64],
    params: WeightParams,
    samples: usize,
    seed: u64,
    tolerance: f64,
    limits: FormLimits,
) -> Result<Outcome> {
    let registry = form_family_registry();
    let forms = registry.get(family)?.build(params.k, &limits)?;
    let mut table = Table::new(
        ctx.out(),
        &["family", "k", "N", "forms", "variables", "estimate", "stderr", "points", "exhaustive"],
    )?;
    let mut verdicts = Verdicts::default();
    let mut previous: Option<(usize, f64)> = None;
    for &n in ns {
        let t = weight(ctx, n, params)?;
        let est = verify_linear_forms(&t.nu, &forms, samples, seed)?;
        table.row([
            family.to_string(),
            params.k.to_string(),
            est.n.to_string(),
            forms.forms().to_string(),
            forms.variables().to_string(),
            num(est.estimate),
            num(est.stderr),
            est.points.to_string(),
            est.exhaustive.to_string(),
        ])?;
        let gap = (est.estimate - 1.0).abs();
        let allowed = (4.0 * est.stderr).max(tolerance);
        verdicts.check(
            &format!("{family} N={}", est.n),
            gap <= allowed,
            format!("{} +- {} (|est - 1| = {gap} against {allowed})", est.estimate, est.stderr),
        );
        if let Some((m, prev_gap)) = previous {
            verdicts.check(
                &format!("{family} trend N={m}->{}", est.n),
                gap < prev_gap,
                format!("|est - 1|: {prev_gap} -> {gap}"),
            );
        }
        if previous.is_none() {
            let ones = GridFunction::constant(est.n, 1.0)?;
            let control = verify_linear_forms(&ones, &forms, samples, seed)?;
            verdicts.check(
                &format!("control nu=1 N={}", est.n),
                control.estimate == 1.0,
                format!("estimate {}", control.estimate),
            );
        }
        previous = Some((est.n, gap));
    }
    table.finish()?;
    Ok(Outcome::Verdict(verdicts.passed()))
}

fn verify_corr(
    ctx: &Context,
    ns: &[u64],
    params: WeightParams,
    q: usize,
    trials: usize,
    seed: u64,
    limits: FormLimits,
) -> Result<Outcome> {
    let mut table = Table::new(
        ctx.out(),
        &["N", "q", "trials", "violations", "worst_ratio", "tau_m1", "tau_m2", "tau_m3", "tau_m4", "moment_budget"],
    )?;
    let mut verdicts = Verdicts::default();
    for &n in ns {
        let t = weight(ctx, n, params)?;
        let r = verify_correlations(&t.nu, q, trials, seed, &limits)?;
        let mut row = vec![
            r.n.to_string(),
            r.q.to_string(),
            r.trials.to_string(),
            r.violations.to_string(),
            num(r.worst_ratio),
        ];
        row.extend(r.moments.iter().map(|&m| num(m)));
        row.push(num(r.moment_budget));
        table.row(row)?;
        verdicts.check(
            &format!("correlations N={}", r.n),
            r.violations == 0,
            format!("{} violations in {} tuples, worst ratio {}", r.violations, r.trials, r.worst_ratio),
        );
        verdicts.check(
            &format!("tau moments N={}", r.n),
            r.moments_within_budget(),
            format!("{:?} against {}", r.moments, r.moment_budget),
        );
    }
    table.finish()?;
    Ok(Outcome::Verdict(verdicts.passed()))
}
