//! Weight tables cached on disk under `GTLAB_CACHE` (or `--cache`).

use std::path::{Path, PathBuf};

use anyhow::Result;
use gtlab_core::format::{load_weight, save_weight};
use gtlab_core::arith::SieveTables;
use gtlab_core::weight::{domination_constant, Weight, WeightRecipe};
use gtlab_core::GridFunction;

pub const CACHE_ENV: &str = "GTLAB_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".gtlab-cache";

pub fn cache_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Built,
    Cached,
}

impl Origin {
    pub fn label(self) -> &'static str {
        match self {
            Origin::Built => "built",
            Origin::Cached => "hit",
        }
    }
}

pub struct WeightTables {
    pub recipe: WeightRecipe,
    /// The sieve the recipe was checked against.
    pub sieve: SieveTables,
    pub nu: GridFunction,
    pub f: GridFunction,
    pub c: f64,
    pub origin: Origin,
}

impl WeightTables {
    pub fn normalized_f(&self) -> Result<GridFunction> {
        let c = self.c;
        Ok(self.f.map(|v| v / c)?)
    }
}

fn stem(recipe: &WeightRecipe) -> String {
    let t = &recipe.wtrick;
    format!("weight-k{}-n{}-a{:?}-w{:?}", t.k, t.n, t.alpha, t.w)
}

/// ν, f and c for the given parameters, read from the cache when a stored
/// entry's header matches (k, N, α, w, b) and its c reproduces, rebuilt and
/// stored otherwise.
pub fn weight_tables(
    k: u32,
    n_target: u64,
    alpha: f64,
    w: Option<f64>,
    dir: Option<&Path>,
) -> Result<WeightTables> {
    let (recipe, sieve) = WeightRecipe::build(k, n_target, alpha, w)?;
    let stem = stem(&recipe);
    if let Some(dir) = dir {
        if let Ok(cached) = load_weight(dir, &stem) {
            let valid = cached.header.matches(&recipe.wtrick)
                && domination_constant(&cached.f, &cached.nu)
                    .map(|c| c.to_bits() == cached.header.c.to_bits())
                    .unwrap_or(false);
            if valid {
                return Ok(WeightTables {
                    recipe,
                    sieve,
                    nu: cached.nu,
                    f: cached.f,
                    c: cached.header.c,
                    origin: Origin::Cached,
                });
            }
            eprintln!("note: cache entry {stem} does not match the request; rebuilding");
        }
    }
    let weight = Weight::build(recipe, &sieve)?;
    if let Some(dir) = dir {
        save_weight(dir, &stem, &weight)?;
    }
    Ok(WeightTables {
        recipe,
        sieve,
        c: weight.c,
        nu: weight.nu,
        f: weight.f,
        origin: Origin::Built,
    })
}
