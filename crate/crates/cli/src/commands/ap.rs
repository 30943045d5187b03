use anyhow::{bail, Result};
use clap::Subcommand;
use gtlab_core::arith::build_sieve;
use gtlab_core::progressions::{
    ap_expectation, count_prime_aps, diagonal_contribution, find_prime_ap, interval_pipeline,
};

use super::{load_source, weight, Context};
use crate::output::{num, Table, Verdicts};
use crate::{Outcome, Source, WeightParams};

#[derive(Subcommand, Debug)]
pub enum ApCommand {
    /// E f(x) f(x+t) ⋯ f(x+kt) over Z_N², with its t = 0 part.
    Expect {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        params: WeightParams,
    },
    /// Lexicographically first progression of primes up to --limit.
    Find {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        limit: u64,
    },
    /// Number of progressions of primes up to each --limit.
    Count {
        #[arg(long)]
        len: usize,
        #[arg(long = "limit", required = true)]
        limits: Vec<u64>,
    },
    /// Interval selection, progression average and lifting on the weight's f.
    Pipeline {
        #[arg(long, default_value_t = 10_007)]
        n: u64,
        #[command(flatten)]
        params: WeightParams,
    },
}

pub fn run(ctx: &Context, cmd: ApCommand) -> Result<Outcome> {
    match cmd {
        ApCommand::Expect { source, n, params } => {
            let (f, _) = load_source(ctx, &source, n, params)?;
            let k = params.k as usize;
            let fs = vec![f; k + 1];
            let e = ap_expectation(&fs, k)?;
            let d = diagonal_contribution(&fs, k)?;
            let mut table = Table::new(ctx.out(), &["k", "N", "expectation", "diagonal", "residual"])?;
            table.row([k.to_string(), fs[0].modulus().to_string(), num(e), num(d), num(e - d)])?;
            table.finish()?;
            Ok(Outcome::Done)
        }
        ApCommand::Find { len, limit } => {
            let sieve = build_sieve(limit.max(2))?;
            let mut header: Vec<String> = ["length", "N", "a", "t"].map(String::from).to_vec();
            header.extend((0..len).map(|j| format!("term{j}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut table = Table::new(ctx.out(), &header)?;
            match find_prime_ap(&sieve, limit, len)? {
                Some(w) => {
                    let mut row = vec![len.to_string(), limit.to_string(), w.start.to_string(), w.difference.to_string()];
                    row.extend(w.terms.iter().map(u64::to_string));
                    table.row(row)?;
                }
                None => eprintln!("no progression of {len} primes up to {limit}"),
            }
            table.finish()?;
            Ok(Outcome::Done)
        }
        ApCommand::Count { len, limits } => {
            let top = *limits.iter().max().expect("at least one limit");
            let sieve = build_sieve(top.max(2))?;
            let mut table = Table::new(ctx.out(), &["length", "N", "count"])?;
            for limit in limits {
                table.row([len.to_string(), limit.to_string(), count_prime_aps(&sieve, limit, len)?.to_string()])?;
            }
            table.finish()?;
            Ok(Outcome::Done)
        }
        ApCommand::Pipeline { n, params } => pipeline(ctx, n, params),
    }
}

fn pipeline(ctx: &Context, n: u64, params: WeightParams) -> Result<Outcome> {
    let t = weight(ctx, n, params)?;
    let w = t.recipe.wtrick;
    let f = t.normalized_f()?;
    let k = params.k as usize;
    if k < 2 {
        bail!("the pipeline needs k >= 2");
    }
    let r = interval_pipeline(&f, k, w.big_w, w.b)?;
    let mut table = Table::new(
        ctx.out(),
        &["k", "N", "W", "b", "j_start", "j_end", "mean_j", "expectation", "diagonal", "residual", "x", "t", "terms"],
    )?;
    let (x, step) = r.support.map(|(x, s)| (x.to_string(), s.to_string())).unwrap_or_default();
    let terms = r
        .integers
        .as_ref()
        .map(|ap| ap.terms.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    table.row([
        k.to_string(),
        w.n.to_string(),
        w.big_w.to_string(),
        w.b.to_string(),
        r.choice.interval.start.to_string(),
        r.choice.interval.end.to_string(),
        num(r.choice.mean),
        num(r.expectation),
        num(r.diagonal),
        num(r.residual),
        x,
        step,
        terms,
    ])?;
    table.finish()?;

    let mut verdicts = Verdicts::default();
    verdicts.check(
        "residual",
        r.residual > 0.0,
        format!("{} - {} = {}", r.expectation, r.diagonal, r.residual),
    );
    match &r.integers {
        Some(ap) => verdicts.check(
            "primes",
            ap.terms.iter().all(|&m| t.sieve.is_prime(m)),
            format!("lifted progression {ap}"),
        ),
        None => verdicts.check("primes", false, "no nondegenerate progression in 1_J f".into()),
    }
    Ok(Outcome::Verdict(verdicts.passed()))
}
