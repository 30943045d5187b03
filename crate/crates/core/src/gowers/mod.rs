//! Gowers uniformity norms `⟦f⟧_d`, dual functions `Df`, and the
//! Cauchy–Schwarz–Gowers inequality.
//!
//! The norm is the `2^d`-th root of the cube average
//! `E_{x,t} Π_{ω∈{0,1}^d} f(x + ω·t)`. Several evaluators compute it, each
//! registered by name in a [`NormRegistry`]:
//!
//! | name        | route                                            | cost                 |
//! |-------------|--------------------------------------------------|----------------------|
//! | `direct`    | literal cube average                             | `N^{d+1} 2^d`        |
//! | `recursive` | `⟦f⟧_{d+1}^{2^{d+1}} = E_t ⟦f f_t⟧_d^{2^d}`      | `~2 N^d`             |
//! | `spectral`  | recursion down to `⟦g⟧_2 = ‖ĝ‖_{ℓ⁴}` by FFT       | `N^{d-2} N log N`    |
//! | `sampled`   | Monte-Carlo over `(x, t)`                        | `samples · 2^d`      |
//!
//! Dual functions have the same family of routes in [`DualRegistry`].

mod cube;
mod dual;
mod norms;

pub use cube::cube_offsets;
pub use dual::{DirectDual, DualEvaluator, SampledDual, SpectralDual};
pub use norms::{DirectNorm, RecursiveNorm, SampledNorm, SpectralNorm};

use crate::error::{gate, GtError, Result};
use crate::registry::Registry;
use crate::zn::GridFunction;

/// Default ceiling on inner operations for exact evaluation.
pub const EXACT_BUDGET: f64 = 1e9;
/// Largest order accepted by the exact evaluators.
pub const MAX_EXACT_ORDER: u32 = 5;
/// Absolute floor for clamping a slightly negative cube average to zero,
/// scaled by `max(1, ‖f‖_∞^{2^d})`.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GowersOrder(u32);

impl GowersOrder {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(GtError::InvalidParameter("Gowers order must be at least 1".into()));
        }
        if d > 16 {
            return Err(GtError::InvalidParameter(format!("Gowers order {d} is absurdly large")));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `2^d`, the number of cube vertices.
    pub fn vertices(self) -> usize {
        1 << self.0
    }

    pub(crate) fn check_exact(self, max: u32) -> Result<()> {
        if self.0 > max {
            return Err(GtError::infeasible(
                format!("exact evaluation at order {}", self.0),
                self.0 as f64,
                max as f64,
            ));
        }
        Ok(())
    }
}

/// A norm value together with the cube average it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    /// `⟦f⟧_d`.
    pub value: f64,
    /// `⟦f⟧_d^{2^d}`, the cube average.
    pub power_mean: f64,
    /// Standard error of `power_mean`; zero for exact evaluators.
    pub stderr: f64,
    pub exact: bool,
}

impl NormEstimate {
    pub(crate) fn exact(f: &GridFunction, order: GowersOrder, power_mean: f64) -> Result<Self> {
        let power_mean = clamp_power(f, order, power_mean)?;
        Ok(Self {
            value: power_mean.powf(1.0 / order.vertices() as f64),
            power_mean,
            stderr: 0.0,
            exact: true,
        })
    }
}

fn clamp_power(f: &GridFunction, order: GowersOrder, power: f64) -> Result<f64> {
    if power >= 0.0 {
        return Ok(power);
    }
    let scale = f.sup_norm().powi(order.vertices() as i32).max(1.0);
    if power >= -CLAMP_TOLERANCE * scale {
        Ok(0.0)
    } else {
        Err(GtError::Internal(format!(
            "cube average {power:e} is negative at order {}",
            order.get()
        )))
    }
}

pub trait GowersEvaluator: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<NormEstimate>;

    fn norm(&self, f: &GridFunction, order: GowersOrder) -> Result<f64> {
        self.evaluate(f, order).map(|e| e.value)
    }
}

pub type NormRegistry = Registry<dyn GowersEvaluator>;
pub type DualRegistry = Registry<dyn DualEvaluator>;

/// All built-in norm evaluators; `sampled` uses the given sample count and seed.
pub fn norm_registry(samples: usize, seed: u64) -> NormRegistry {
    let mut r = NormRegistry::new("gowers norm");
    r.register("direct", Box::new(DirectNorm::default()))
        .register("recursive", Box::new(RecursiveNorm::default()))
        .register("spectral", Box::new(SpectralNorm::default()))
        .register("sampled", Box::new(SampledNorm::new(samples, seed)));
    r
}

/// All built-in dual evaluators; `sampled` uses the given per-point sample
/// count and seed.
pub fn dual_registry(samples: usize, seed: u64) -> DualRegistry {
    let mut r = DualRegistry::new("dual function");
    r.register("direct", Box::new(DirectDual::default()))
        .register("spectral", Box::new(SpectralDual::default()))
        .register("sampled", Box::new(SampledDual::new(samples, seed)));
    r
}

/// Outcome of a Cauchy–Schwarz–Gowers check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsgReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `|E Π_ω f_ω(x + ω·t)|` with `Π_ω ⟦f_ω⟧_d`. `fs[i]` sits at the
/// vertex whose bit `j` is `ω_{j+1}`.
pub fn csg_check(fs: &[GridFunction], order: GowersOrder) -> Result<CsgReport> {
    if fs.len() != order.vertices() {
        return Err(GtError::InvalidParameter(format!(
            "CSG at order {} needs {} functions, got {}",
            order.get(),
            order.vertices(),
            fs.len()
        )));
    }
    for f in &fs[1..] {
        fs[0].check_modulus(f)?;
    }
    order.check_exact(MAX_EXACT_ORDER)?;
    let n = fs[0].modulus();
    let d = order.get() as i32;
    gate(
        "cube average",
        (n as f64).powi(d + 1) * order.vertices() as f64,
        EXACT_BUDGET,
    )?;
    let lhs = cube::cube_average(fs, order).abs();
    let evaluator = RecursiveNorm::default();
    let mut rhs = 1.0;
    for f in fs {
        rhs *= evaluator.norm(f, order)?;
    }
    Ok(CsgReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}
