use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gtlab_core::decompose::{decompose, DecomposeParams};
use gtlab_core::format::{load_grid, save_decomposition};
use gtlab_core::gowers::{dual_registry, norm_registry};
use gtlab_core::sampling::stream_rng;
use gtlab_core::GridFunction;

use super::gowers::canonical_mode;
use super::{load_source, Context};
use crate::output::{num, Table};
use crate::{Outcome, Source, WeightParams};

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    n: Option<usize>,
    /// Stop once the Gowers norm of the remainder is at most this.
    #[arg(long = "eps", default_value_t = 0.4)]
    epsilon: f64,
    /// Boundary and bad-atom scale (default eps^(2^(k+2))).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Majorant ν as a GTF1 file; defaults to the weight with --weight, else ν ≡ 1.
    #[arg(long, value_name = "PATH")]
    nu_file: Option<PathBuf>,
    /// Norm strategy.
    #[arg(long, default_value = "spectral")]
    mode: String,
    /// Dual-function strategy.
    #[arg(long, default_value = "spectral")]
    dual_mode: String,
    /// Samples for sampled strategies.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Directory for report.txt and the g, h, Ω tables.
    #[arg(long, value_name = "DIR")]
    report: Option<PathBuf>,
    #[command(flatten)]
    weight: WeightParams,
}

pub fn run(ctx: &Context, a: DecomposeArgs) -> Result<Outcome> {
    let norms = norm_registry(a.samples, a.seed);
    let duals = dual_registry(a.samples, a.seed);
    let norm = norms.get(canonical_mode(&a.mode))?;
    let dual = duals.get(canonical_mode(&a.dual_mode))?;

    let (f, tables) = load_source(ctx, &a.source, a.n, a.weight)?;
    let nu = match (&a.nu_file, tables) {
        (Some(path), _) => load_grid(path)?,
        (None, Some(t)) => t.nu,
        (None, None) => GridFunction::constant(f.modulus(), 1.0)?,
    };
    let params = DecomposeParams {
        sigma: a.sigma,
        max_iter: a.max_iter,
        ..DecomposeParams::new(a.weight.k, a.epsilon)
    };
    let mut rng = stream_rng(a.seed, 0);
    let r = decompose(&f, &nu, &params, norm, dual, &mut rng)?;

    let mut table = Table::new(ctx.out(), &["iteration", "energy", "norm", "alpha", "boundary_mass"])?;
    for i in 0..r.iterations {
        table.row([
            (i + 1).to_string(),
            num(r.energies[i]),
            num(r.norms[i]),
            r.rules.get(i).map(|rule| num(rule.alpha)).unwrap_or_default(),
            r.boundary_masses.get(i).map(|&m| num(m)).unwrap_or_default(),
        ])?;
    }
    table.finish()?;
    if let Some(dir) = &a.report {
        save_decomposition(dir, &r)?;
    }
    let d = r.diagnostics;
    eprintln!(
        "iterations={} atoms={} h_norm={} g_sup={} nu_on_omega={} nu_deviation={}",
        r.iterations,
        r.partition.atom_count(),
        d.h_norm,
        d.g_sup,
        d.nu_on_omega,
        d.nu_deviation
    );
    Ok(Outcome::Done)
}
