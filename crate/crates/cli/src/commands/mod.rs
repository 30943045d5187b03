pub mod ap;
pub mod decompose;
pub mod gowers;
pub mod misc;
pub mod weight;

use std::path::PathBuf;

use anyhow::{bail, Result};
use gtlab_core::format::load_grid;
use gtlab_core::GridFunction;

use crate::cache::{weight_tables, WeightTables};
use crate::{Source, WeightParams};

pub struct Context {
    pub out: Option<PathBuf>,
    pub cache: PathBuf,
}

impl Context {
    pub fn out(&self) -> Option<&std::path::Path> {
        self.out.as_deref()
    }
}

pub fn weight(ctx: &Context, n_target: u64, p: WeightParams) -> Result<WeightTables> {
    weight_tables(p.k, n_target, p.alpha, p.w, Some(&ctx.cache))
}

/// The function named by `source`, plus the weight when it came from one.
pub fn load_source(
    ctx: &Context,
    source: &Source,
    n: Option<usize>,
    params: WeightParams,
) -> Result<(GridFunction, Option<WeightTables>)> {
    if let Some(path) = &source.file {
        let f = load_grid(path)?;
        if let Some(n) = n {
            if n != f.modulus() {
                bail!("--n {n} disagrees with N = {} in {}", f.modulus(), path.display());
            }
        }
        return Ok((f, None));
    }
    let Some(n) = n else {
        bail!("--n is required unless --file is given");
    };
    if n == 0 {
        bail!("--n must be positive");
    }
    let f = if let Some(c) = source.constant {
        GridFunction::constant(n, c)?
    } else if source.delta0 {
        GridFunction::delta(n, 0)?
    } else if source.half {
        GridFunction::from_fn(n, |x| if x < n / 2 { 1.0 } else { 0.0 })?
    } else {
        let tables = weight(ctx, n as u64, params)?;
        return Ok((tables.normalized_f()?, Some(tables)));
    };
    Ok((f, None))
}
