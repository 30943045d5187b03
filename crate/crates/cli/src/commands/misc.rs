use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gtlab_core::arith::{build_sieve, CHEBYSHEV_VALID_FROM};
use gtlab_core::format::{load_sieve, save_sieve};
use gtlab_core::gowers::{dual_registry, norm_registry};
use gtlab_core::weight::form_family_registry;

use super::Context;
use crate::output::{num, Table};
use crate::Outcome;

#[derive(Args, Debug)]
pub struct SieveArgs {
    #[arg(long)]
    limit: u64,
    /// Save the tables as GTS1 here.
    #[arg(long, value_name = "PATH")]
    save: Option<PathBuf>,
    /// Read GTS1 tables from here instead of sieving.
    #[arg(long, value_name = "PATH", conflicts_with = "save")]
    load: Option<PathBuf>,
}

pub fn sieve(ctx: &Context, a: SieveArgs) -> Result<Outcome> {
    let tables = match &a.load {
        Some(path) => {
            let t = load_sieve(path)?;
            t.ensure_covers(a.limit)?;
            t
        }
        None => build_sieve(a.limit)?,
    };
    if let Some(path) = &a.save {
        save_sieve(path, &tables)?;
    }
    let mut table = Table::new(ctx.out(), &["limit", "primes", "chebyshev_lower", "chebyshev_upper", "bracket_holds"])?;
    let (lower, upper, holds) = match tables.chebyshev_check(a.limit) {
        Ok(c) => (num(c.lower), num(c.upper), c.holds().to_string()),
        Err(_) => Default::default(),
    };
    table.row([a.limit.to_string(), tables.prime_count(a.limit).to_string(), lower, upper, holds])?;
    table.finish()?;
    if a.limit < CHEBYSHEV_VALID_FROM {
        eprintln!("note: the Chebyshev bracket is only claimed from x = {CHEBYSHEV_VALID_FROM}");
    }
    Ok(Outcome::Done)
}

pub fn strategies(ctx: &Context) -> Result<Outcome> {
    let mut table = Table::new(ctx.out(), &["kind", "name"])?;
    let norms = norm_registry(0, 0);
    let duals = dual_registry(0, 0);
    let families = form_family_registry();
    for (kind, names) in [
        ("mode", norms.names()),
        ("dual-mode", duals.names()),
        ("family", families.names()),
    ] {
        for name in names {
            table.row([kind, name])?;
        }
    }
    table.row(["mode", "fft"])?;
    table.finish()?;
    Ok(Outcome::Done)
}
