//! Empirical check of `E(ν(x+h₁)⋯ν(x+h_q)) ≤ Σ_{i<j} τ(h_i − h_j)` with the
//! constructive choice `τ̂(h) = max(C(h), 1)`, `C(h) = E(ν(x)ν(x+h))`.

use rand::Rng;
use rayon::prelude::*;

use super::forms::FormLimits;
use crate::error::{GtError, Result};
use crate::fourier::autocorrelation;
use crate::sampling::stream_rng;
use crate::zn::GridFunction;

/// Fewest random tuples accepted.
pub const MIN_TRIALS: usize = 100;
/// Ceiling each moment `E_h τ̂(h)^p` is compared against.
pub const MOMENT_BUDGET: f64 = 100.0;
/// Relative slack on the comparison, absorbing rounding in both sides.
const COMPARE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub n: usize,
    pub q: usize,
    pub trials: usize,
    /// `E_h τ̂(h)^p` for `p = 1..=4`.
    pub moments: [f64; 4],
    pub moment_budget: f64,
    pub violations: usize,
    /// Largest `LHS / RHS` seen over all tuples.
    pub worst_ratio: f64,
}

impl CorrelationReport {
    pub fn violation_rate(&self) -> f64 {
        self.violations as f64 / self.trials as f64
    }

    pub fn moments_within_budget(&self) -> bool {
        self.moments.iter().all(|m| m.is_finite() && *m <= self.moment_budget)
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.moments_within_budget()
    }
}

/// `τ̂(h) = max(E(ν(x)ν(x+h)), 1)` for every h.
pub fn tau_hat(nu: &GridFunction) -> Result<Vec<f64>> {
    Ok(autocorrelation(nu)?
        .into_values()
        .into_iter()
        .map(|c| c.max(1.0))
        .collect())
}

pub fn verify_correlations(
    nu: &GridFunction,
    q: usize,
    trials: usize,
    seed: u64,
    limits: &FormLimits,
) -> Result<CorrelationReport> {
    if q < 2 || q > limits.q0 {
        return Err(GtError::InvalidParameter(format!(
            "q must lie in 2..={}, got {q}",
            limits.q0
        )));
    }
    if trials < MIN_TRIALS {
        return Err(GtError::InvalidParameter(format!(
            "correlation check needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let n = nu.modulus();
    let tau = tau_hat(nu)?;
    let mut moments = [0.0; 4];
    for (p, m) in moments.iter_mut().enumerate() {
        *m = tau.iter().map(|t| t.powi(p as i32 + 1)).sum::<f64>() / n as f64;
    }
    let values = nu.values();
    let ratios: Vec<(bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial as u64);
            let h: Vec<usize> = (0..q).map(|_| rng.gen_range(0..n)).collect();
            let lhs = (0..n)
                .map(|x| {
                    h.iter()
                        .map(|&hi| values[(x + hi) % n])
                        .product::<f64>()
                })
                .sum::<f64>()
                / n as f64;
            let mut rhs = 0.0;
            for i in 0..q {
                for j in i + 1..q {
                    rhs += tau[(h[i] + n - h[j]) % n];
                }
            }
            (lhs > rhs * (1.0 + COMPARE_SLACK), lhs / rhs)
        })
        .collect();
    Ok(CorrelationReport {
        n,
        q,
        trials,
        moments,
        moment_budget: MOMENT_BUDGET,
        violations: ratios.iter().filter(|(v, _)| *v).count(),
        worst_ratio: ratios.iter().map(|(_, r)| *r).fold(0.0, f64::max),
    })
}
