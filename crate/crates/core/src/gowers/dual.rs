//! Dual functions `Df(x) = E_t Π_{ω≠0} f(x + ω·t)`, so that `⟨f, Df⟩ = ⟦f⟧_k^{2^k}`.

use rand::Rng;
use rayon::prelude::*;

use super::cube::{cube_offsets, dual_direct};
use super::norms::{fft_cost, MIN_SAMPLES};
use super::{GowersOrder, EXACT_BUDGET, MAX_EXACT_ORDER};
use crate::error::{gate, GtError, Result};
use crate::fourier::FourierPlan;
use crate::sampling::{monte_carlo, stream_rng};
use crate::zn::GridFunction;

pub trait DualEvaluator: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<GridFunction>;
}

/// Loops over every `t ∈ Z_N^k` for every x.
#[derive(Clone, Copy, Debug)]
pub struct DirectDual {
    pub budget: f64,
    pub max_order: u32,
}

impl Default for DirectDual {
    fn default() -> Self {
        Self {
            budget: EXACT_BUDGET,
            max_order: MAX_EXACT_ORDER,
        }
    }
}

impl DualEvaluator for DirectDual {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<GridFunction> {
        order.check_exact(self.max_order)?;
        let n = f.modulus() as f64;
        gate(
            "direct dual function",
            n.powi(order.get() as i32 + 1) * order.vertices() as f64,
            self.budget,
        )?;
        GridFunction::new(dual_direct(f, order))
    }
}

/// Exact evaluation through `D_k f(x) = E_h f(x+h) · D_{k-1}(f·f_h)(x)`,
/// with `D_1 g = E g` and `D_2 g = E_h g(·+h) C_g(h)` done by FFT.
///
/// The admission gate is the per-point cube cost `N^k 2^k`; the work actually
/// done is `N^{k-2}` FFT correlations.
#[derive(Clone, Copy, Debug)]
pub struct SpectralDual {
    pub budget: f64,
    pub max_order: u32,
}

impl Default for SpectralDual {
    fn default() -> Self {
        Self {
            budget: EXACT_BUDGET,
            max_order: MAX_EXACT_ORDER,
        }
    }
}

fn spectral_dual(plan: &FourierPlan, f: &GridFunction, k: u32) -> Result<Vec<f64>> {
    let n = f.modulus();
    match k {
        1 => Ok(vec![f.expectation(); n]),
        2 => {
            let c = plan.autocorrelation(f)?;
            Ok(plan.cross_correlation(f, &c)?.into_values())
        }
        _ => {
            let mut out = vec![0.0; n];
            for h in 0..n {
                let inner = spectral_dual(plan, &f.times_shift(h), k - 1)?;
                accumulate_shifted(&mut out, f, h, &inner);
            }
            let scale = 1.0 / n as f64;
            out.iter_mut().for_each(|v| *v *= scale);
            Ok(out)
        }
    }
}

// out(x) += f(x + h) · inner(x)
fn accumulate_shifted(out: &mut [f64], f: &GridFunction, h: usize, inner: &[f64]) {
    let n = f.modulus();
    let vals = f.values();
    for (x, (o, i)) in out.iter_mut().zip(inner).enumerate() {
        let y = if x + h >= n { x + h - n } else { x + h };
        *o += vals[y] * i;
    }
}

impl DualEvaluator for SpectralDual {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<GridFunction> {
        order.check_exact(self.max_order)?;
        let n = f.modulus() as f64;
        let k = order.get();
        gate(
            "exact dual function",
            n.powi(k as i32) * order.vertices() as f64,
            self.budget,
        )?;
        let plan = FourierPlan::new(f.modulus());
        if k <= 2 {
            return GridFunction::new(spectral_dual(&plan, f, k)?);
        }
        gate(
            "exact dual function (FFT work)",
            n.powi(k as i32 - 2) * fft_cost(n) * 3.0,
            self.budget * 10.0,
        )?;
        let m = f.modulus();
        let parts: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|h| {
                let inner = spectral_dual(&plan, &f.times_shift(h), k - 1)?;
                let mut part = vec![0.0; m];
                accumulate_shifted(&mut part, f, h, &inner);
                Ok(part)
            })
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; m];
        for part in &parts {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        let scale = 1.0 / n;
        out.iter_mut().for_each(|v| *v *= scale);
        GridFunction::new(out)
    }
}

/// Per-point Monte-Carlo over `t`; point x draws from stream `(seed, x)`.
#[derive(Clone, Copy, Debug)]
pub struct SampledDual {
    pub samples: usize,
    pub seed: u64,
}

impl SampledDual {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed }
    }
}

impl DualEvaluator for SampledDual {
    fn name(&self) -> &'static str {
        "sampled"
    }

    fn evaluate(&self, f: &GridFunction, order: GowersOrder) -> Result<GridFunction> {
        if self.samples < MIN_SAMPLES {
            return Err(GtError::InvalidParameter(format!(
                "sampled dual needs at least {MIN_SAMPLES} samples per point, got {}",
                self.samples
            )));
        }
        let n = f.modulus();
        let k = order.get() as usize;
        let values = f.values();
        let out: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|x| {
                // Distinct seed per point; block streams inside come from it.
                let seed = stream_rng(self.seed, x as u64).gen::<u64>();
                monte_carlo(self.samples, seed, |rng| {
                    let t: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
                    cube_offsets(&t, n)[1..]
                        .iter()
                        .map(|&off| values[(x + off) % n])
                        .product::<f64>()
                })
                .mean
            })
            .collect();
        GridFunction::new(out)
    }
}
