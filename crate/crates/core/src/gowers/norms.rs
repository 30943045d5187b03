use rand::Rng;

use super::cube::{cube_average_single, cube_offsets};
use super::{GowersEvaluator, GowersOrder, NormEstimate, EXACT_BUDGET, MAX_EXACT_ORDER};
use crate::error::{gate, GtError, Result};
use crate::fourier::FourierPlan;
use crate::sampling::monte_carlo;
use crate::zn::GridFunction;

/// Literal cube average over `Z_N^{d+1}`.
#[derive(Clone, Copy, Debug)]
pub struct DirectNorm {
    pub budget: f64,
    pub max_order: u32,
}

impl Default for DirectNorm {
    fn default() -> Self {
        Self {
            budget: EXACT_BUDGET,
            max_order: MAX_EXACT_ORDER,
        }
    }
}

impl GowersEvaluator for DirectNorm {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<NormEstimate> {
        order.check_exact(self.max_order)?;
        let n = f.modulus() as f64;
        let d = order.get() as i32;
        gate("direct Gowers norm", n.powi(d + 1) * order.vertices() as f64, self.budget)?;
        NormEstimate::exact(f, order, cube_average_single(f, order))
    }
}

/// `⟦f⟧_1 = |E f|` and `⟦f⟧_{d+1}^{2^{d+1}} = E_t ⟦f·f_t⟧_d^{2^d}`.
#[derive(Clone, Copy, Debug)]
pub struct RecursiveNorm {
    pub budget: f64,
    pub max_order: u32,
}

impl Default for RecursiveNorm {
    fn default() -> Self {
        Self {
            budget: EXACT_BUDGET,
            max_order: MAX_EXACT_ORDER,
        }
    }
}

fn recursive_cost(n: f64, d: u32) -> f64 {
    if d == 1 {
        n
    } else {
        n * (n + recursive_cost(n, d - 1))
    }
}

fn recursive_power(f: &GridFunction, d: u32) -> f64 {
    if d == 1 {
        let e = f.expectation();
        return e * e;
    }
    let n = f.modulus();
    let total: f64 = (0..n).map(|t| recursive_power(&f.times_shift(t), d - 1)).sum();
    total / n as f64
}

impl GowersEvaluator for RecursiveNorm {
    fn name(&self) -> &'static str {
        "recursive"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<NormEstimate> {
        order.check_exact(self.max_order)?;
        gate(
            "recursive Gowers norm",
            recursive_cost(f.modulus() as f64, order.get()),
            self.budget,
        )?;
        let power = if order.get() == 1 {
            recursive_power(f, 1)
        } else {
            // The outermost level is split across threads; the result is
            // summed in shift order so it does not depend on scheduling.
            use rayon::prelude::*;
            let n = f.modulus();
            let parts: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|t| recursive_power(&f.times_shift(t), order.get() - 1))
                .collect();
            parts.iter().sum::<f64>() / n as f64
        };
        NormEstimate::exact(f, order, power)
    }
}

/// Recursion down to order 2, where `⟦g⟧_2^4 = Σ_ξ |ĝ(ξ)|⁴`.
#[derive(Clone, Copy, Debug)]
pub struct SpectralNorm {
    pub budget: f64,
    pub max_order: u32,
}

impl Default for SpectralNorm {
    fn default() -> Self {
        Self {
            budget: EXACT_BUDGET,
            max_order: MAX_EXACT_ORDER,
        }
    }
}

pub(crate) fn fft_cost(n: f64) -> f64 {
    // Bluestein pads to a power of two at least 2N-1.
    let padded = (2.0 * n).max(2.0);
    padded * padded.log2()
}

fn spectral_power(plan: &FourierPlan, f: &GridFunction, d: u32) -> f64 {
    match d {
        1 => {
            let e = f.expectation();
            e * e
        }
        2 => plan.fourth_moment(f),
        _ => {
            let n = f.modulus();
            let total: f64 = (0..n)
                .map(|t| spectral_power(plan, &f.times_shift(t), d - 1))
                .sum();
            total / n as f64
        }
    }
}

impl GowersEvaluator for SpectralNorm {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<NormEstimate> {
        order.check_exact(self.max_order)?;
        let n = f.modulus() as f64;
        let d = order.get() as i32;
        gate(
            "spectral Gowers norm",
            n.powi((d - 2).max(0)) * fft_cost(n),
            self.budget,
        )?;
        let plan = FourierPlan::new(f.modulus());
        let power = if d <= 2 {
            spectral_power(&plan, f, order.get())
        } else {
            use rayon::prelude::*;
            let parts: Vec<f64> = (0..f.modulus())
                .into_par_iter()
                .map(|t| spectral_power(&plan, &f.times_shift(t), order.get() - 1))
                .collect();
            parts.iter().sum::<f64>() / n
        };
        NormEstimate::exact(f, order, power)
    }
}

/// Unbiased Monte-Carlo estimate of the cube average over uniform `(x, t)`.
#[derive(Clone, Copy, Debug)]
pub struct SampledNorm {
    pub samples: usize,
    pub seed: u64,
}

/// Fewest samples accepted by the sampled estimators.
pub const MIN_SAMPLES: usize = 1000;

impl SampledNorm {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed }
    }
}

impl GowersEvaluator for SampledNorm {
    fn name(&self) -> &'static str {
        "sampled"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<NormEstimate> {
        if self.samples < MIN_SAMPLES {
            return Err(GtError::InvalidParameter(format!(
                "sampled norm needs at least {MIN_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        let n = f.modulus();
        let d = order.get() as usize;
        let values = f.values();
        let est = monte_carlo(self.samples, self.seed, |rng| {
            let x = rng.gen_range(0..n);
            let t: Vec<usize> = (0..d).map(|_| rng.gen_range(0..n)).collect();
            cube_offsets(&t, n)
                .iter()
                .map(|&off| values[(x + off) % n])
                .product::<f64>()
        });
        Ok(NormEstimate {
            value: est.mean.max(0.0).powf(1.0 / order.vertices() as f64),
            power_mean: est.mean,
            stderr: est.stderr,
            exact: false,
        })
    }
}
