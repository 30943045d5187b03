use anyhow::Result;
use clap::Args;
use gtlab_core::gowers::{norm_registry, GowersOrder};

use super::{load_source, Context};
use crate::output::{num, Table};
use crate::{Outcome, Source, WeightParams};

#[derive(Args, Debug)]
pub struct GowersArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    n: Option<usize>,
    /// Norm order.
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// direct, recursive, spectral (alias fft) or sampled.
    #[arg(long, default_value = "recursive")]
    mode: String,
    /// Samples for --mode sampled.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    weight: WeightParams,
}

pub fn canonical_mode(mode: &str) -> &str {
    match mode {
        "fft" => "spectral",
        other => other,
    }
}

pub fn run(ctx: &Context, a: GowersArgs) -> Result<Outcome> {
    let registry = norm_registry(a.samples, a.seed);
    let evaluator = registry.get(canonical_mode(&a.mode))?;
    let order = GowersOrder::new(a.d)?;
    let (f, _) = load_source(ctx, &a.source, a.n, a.weight)?;
    let est = evaluator.evaluate(&f, order)?;
    let mut table = Table::new(ctx.out(), &["N", "d", "mode", "norm", "power_mean", "stderr", "exact"])?;
    table.row([
        f.modulus().to_string(),
        a.d.to_string(),
        evaluator.name().to_string(),
        num(est.value),
        num(est.power_mean),
        num(est.stderr),
        est.exact.to_string(),
    ])?;
    table.finish()?;
    Ok(Outcome::Done)
}
