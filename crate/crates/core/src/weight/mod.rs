//! The pseudorandom majorant along a W-tricked progression.
//!
//! With `R = N^α` and the normalized bump `χ`,
//!
//! ```text
//! λ(m) = Σ_{d | m} μ(d) χ(log d / log R)
//! ν(n) = φ(W)/W · log R · λ(Wn + b)²
//! f(n) = φ(W)/W · log(Wn + b)   if Wn + b ≥ R is prime, else 0
//! ```
//!
//! `f` is dominated by a constant multiple of `ν`. The submodules hold the
//! numerical checks of the linear-forms and correlation conditions.

mod correlations;
mod cutoff;
mod forms;

pub use correlations::{verify_correlations, CorrelationReport};
pub use cutoff::{make_cutoff, SmoothCutoff, CROSS_CHECK_TOL};
pub use forms::{
    form_family_registry, verify_linear_forms, ApFamily, CubeFamily, FormFamily, FormLimits,
    FormRegistry, FormsEstimate, IdentityFamily, LinearFormFamily, EXHAUSTIVE_LIMIT,
    MIN_FORM_SAMPLES,
};

use rayon::prelude::*;

use crate::arith::{gcd, make_wtrick_params, SieveTables, WTrickParams};
use crate::error::{gate, GtError, Result};
use crate::zn::GridFunction;

/// Ceiling on `(d, d′)` pairs visited by the divisor-sum oracle.
pub const ORACLE_BUDGET: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightRecipe {
    pub wtrick: WTrickParams,
    pub cutoff: SmoothCutoff,
}

impl WeightRecipe {
    /// Checks the recipe against the sieve it will be evaluated with.
    pub fn new(wtrick: WTrickParams, cutoff: SmoothCutoff, sieve: &SieveTables) -> Result<Self> {
        sieve.ensure_covers(wtrick.big_w * wtrick.n + wtrick.big_w)?;
        if wtrick.r <= wtrick.big_w as f64 {
            return Err(GtError::Precondition(format!(
                "R = {:.4} must exceed W = {}; raise alpha or lower w",
                wtrick.r, wtrick.big_w
            )));
        }
        Ok(Self { wtrick, cutoff })
    }

    /// W-trick parameters, sieve and cutoff in one step.
    pub fn build(
        k: u32,
        n_target: u64,
        alpha: f64,
        w_override: Option<f64>,
    ) -> Result<(Self, SieveTables)> {
        let (wtrick, sieve) = make_wtrick_params(k, n_target, alpha, w_override)?;
        let recipe = Self::new(wtrick, make_cutoff()?, &sieve)?;
        Ok((recipe, sieve))
    }

    pub fn k(&self) -> u32 {
        self.wtrick.k
    }

    pub fn modulus(&self) -> usize {
        self.wtrick.n as usize
    }

    /// `φ(W)/W · log R`, the factor in front of `λ²`.
    pub fn nu_scale(&self) -> f64 {
        self.wtrick.phi_ratio() * self.wtrick.log_r()
    }

    /// `Wn + b`.
    pub fn point(&self, n: usize) -> u64 {
        self.wtrick.big_w * n as u64 + self.wtrick.b
    }

    /// `(d, μ(d) χ(log d / log R))` for squarefree `d < R`.
    pub fn divisor_weights(&self, sieve: &SieveTables) -> Result<Vec<(u64, f64)>> {
        let top = self.wtrick.r.ceil() as u64;
        sieve.ensure_covers(top)?;
        let log_r = self.wtrick.log_r();
        let mut out = vec![(1, self.cutoff.at_zero())];
        for d in 2..top {
            if (d as f64) >= self.wtrick.r {
                break;
            }
            let mu = sieve.mobius(d);
            if mu != 0 {
                out.push((d, mu as f64 * self.cutoff.value((d as f64).ln() / log_r)));
            }
        }
        Ok(out)
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (a as i128 % m as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}

/// First `n ≥ 0` with `d | Wn + b` and the period of such n, if any exist.
fn divisor_class(big_w: u64, b: u64, d: u64) -> Option<(u64, u64)> {
    if d == 1 {
        return Some((0, 1));
    }
    let g = gcd(big_w, d);
    if b % g != 0 {
        return None;
    }
    let period = d / g;
    if period == 1 {
        return Some((0, 1));
    }
    let inv = mod_inverse((big_w / g) % period, period)?;
    let target = (period - (b / g) % period) % period;
    Some(((target as u128 * inv as u128 % period as u128) as u64, period))
}

const LAMBDA_CHUNK: usize = 1 << 14;

/// `λ(Wn + b)` for `n ∈ [0, N)`, by sieving over the divisors `d < R`.
pub fn lambda_table(recipe: &WeightRecipe, sieve: &SieveTables) -> Result<Vec<f64>> {
    let n = recipe.modulus();
    sieve.ensure_covers(recipe.point(n - 1))?;
    let classes: Vec<(u64, u64, f64)> = recipe
        .divisor_weights(sieve)?
        .into_iter()
        .filter_map(|(d, w)| {
            divisor_class(recipe.wtrick.big_w, recipe.wtrick.b, d).map(|(r, p)| (r, p, w))
        })
        .collect();
    let mut table = vec![0.0; n];
    table
        .par_chunks_mut(LAMBDA_CHUNK)
        .enumerate()
        .for_each(|(chunk, slot)| {
            let lo = (chunk * LAMBDA_CHUNK) as u64;
            let hi = lo + slot.len() as u64;
            for &(r, p, w) in &classes {
                let mut i = if r >= lo { r } else { lo + (p - (lo - r) % p) % p };
                while i < hi {
                    slot[(i - lo) as usize] += w;
                    i += p;
                }
            }
        });
    Ok(table)
}

/// `ν(n) = φ(W)/W · log R · λ(Wn + b)²`.
pub fn build_nu(recipe: &WeightRecipe, lambda: &[f64]) -> Result<GridFunction> {
    if lambda.len() != recipe.modulus() {
        return Err(GtError::ModulusMismatch {
            left: lambda.len(),
            right: recipe.modulus(),
        });
    }
    let scale = recipe.nu_scale();
    GridFunction::new(lambda.iter().map(|l| scale * l * l).collect())
}

/// The prime-supported function along `Wn + b`, zero below R.
pub fn build_f(recipe: &WeightRecipe, sieve: &SieveTables) -> Result<GridFunction> {
    let n = recipe.modulus();
    sieve.ensure_covers(recipe.point(n - 1))?;
    let ratio = recipe.wtrick.phi_ratio();
    let r = recipe.wtrick.r;
    GridFunction::from_fn(n, |i| {
        let m = recipe.point(i);
        if m as f64 >= r && sieve.is_prime(m) {
            ratio * (m as f64).ln()
        } else {
            0.0
        }
    })
}

/// Smallest float `c` with `f ≤ c·ν` and `f/c ≤ ν` exactly at every point.
///
/// Starts from the maximum of `f/ν` over the support of f and steps up by
/// ulps until both comparisons hold in floating point.
pub fn domination_constant(f: &GridFunction, nu: &GridFunction) -> Result<f64> {
    f.check_modulus(nu)?;
    let mut c: f64 = 0.0;
    for (i, (&fv, &nv)) in f.values().iter().zip(nu.values()).enumerate() {
        if fv < 0.0 || nv < 0.0 {
            return Err(GtError::Precondition(format!("negative value at {i}")));
        }
        if fv > 0.0 {
            if nv == 0.0 {
                return Err(GtError::Internal(format!("ν vanishes on the support of f at {i}")));
            }
            c = c.max(fv / nv);
        }
    }
    if c == 0.0 {
        return Err(GtError::Precondition("f vanishes identically".into()));
    }
    let dominated = |c: f64| {
        f.values()
            .iter()
            .zip(nu.values())
            .all(|(&fv, &nv)| fv <= c * nv && fv / c <= nv)
    };
    for _ in 0..64 {
        if dominated(c) {
            return Ok(c);
        }
        c = c.next_up();
    }
    Err(GtError::Internal("domination constant did not settle".into()))
}

/// A built weight: λ, ν, f and the constant c with `f ≤ c·ν`.
#[derive(Clone, Debug)]
pub struct Weight {
    pub recipe: WeightRecipe,
    pub lambda: Vec<f64>,
    pub nu: GridFunction,
    pub f: GridFunction,
    pub c: f64,
}

impl Weight {
    pub fn build(recipe: WeightRecipe, sieve: &SieveTables) -> Result<Self> {
        let lambda = lambda_table(&recipe, sieve)?;
        let nu = build_nu(&recipe, &lambda)?;
        let f = build_f(&recipe, sieve)?;
        let c = domination_constant(&f, &nu)?;
        Ok(Self {
            recipe,
            lambda,
            nu,
            f,
            c,
        })
    }

    /// `f / c`, which satisfies `0 ≤ f/c ≤ ν`.
    pub fn normalized_f(&self) -> Result<GridFunction> {
        let c = self.c;
        self.f.map(|v| v / c)
    }

    /// `E(f | Z_N)`, the density recorded as δ₀.
    pub fn delta0(&self) -> f64 {
        self.f.expectation()
    }
}

/// Main term of `E(ν)` from expanding `λ²` over pairs of divisors:
/// `C Σ_{d,d′} μ(d)μ(d′) χ χ · E_{lcm}`, where the local factor is 0 when
/// `lcm(d, d′)` shares a prime with W and `1/lcm` otherwise.
pub fn mean_nu_divisor_oracle(recipe: &WeightRecipe, sieve: &SieveTables) -> Result<f64> {
    let ds = recipe.divisor_weights(sieve)?;
    let pairs = ds.len() as f64 * (ds.len() as f64 + 1.0) / 2.0;
    gate("divisor-sum oracle", pairs, ORACLE_BUDGET)?;
    let big_w = recipe.wtrick.big_w;
    let local = |d: u64, e: u64| {
        let l = d / gcd(d, e) * e;
        if gcd(l, big_w) == 1 {
            1.0 / l as f64
        } else {
            0.0
        }
    };
    let rows: Vec<f64> = (0..ds.len())
        .into_par_iter()
        .map(|i| {
            let (d, wd) = ds[i];
            let mut row = wd * wd * local(d, d);
            for &(e, we) in &ds[i + 1..] {
                row += 2.0 * wd * we * local(d, e);
            }
            row
        })
        .collect();
    Ok(recipe.nu_scale() * rows.iter().sum::<f64>())
}
