//! Affine-linear form families `ψ_i(x) = b_i + Σ_j L_{ij} x_j` and the
//! average of `Π_i ν(ψ_i(x))` over `x ∈ Z_N^t`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{GtError, Result};
use crate::registry::Registry;
use crate::sampling::monte_carlo;
use crate::zn::GridFunction;

/// Fewest Monte-Carlo samples accepted.
pub const MIN_FORM_SAMPLES: usize = 10_000;
/// Families with `N^t` at most this many points are averaged exhaustively.
pub const EXHAUSTIVE_LIMIT: f64 = 1e7;

/// Size limits on form families and correlation tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormLimits {
    /// Most forms in a family.
    pub m0: usize,
    /// Most variables.
    pub t: usize,
    /// Largest allowed `|L_{ij}|`.
    pub l_bound: i64,
    /// Largest correlation tuple size.
    pub q0: usize,
}

impl Default for FormLimits {
    fn default() -> Self {
        Self {
            m0: 9,
            t: 5,
            l_bound: 10,
            q0: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFormFamily {
    coefficients: Vec<Vec<i64>>,
    offsets: Vec<i64>,
}

fn parallel(a: &[i64], b: &[i64]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] as i128 * b[j] as i128 != a[j] as i128 * b[i] as i128 {
                return false;
            }
        }
    }
    true
}

impl LinearFormFamily {
    pub fn new(coefficients: Vec<Vec<i64>>, offsets: Vec<i64>, limits: &FormLimits) -> Result<Self> {
        let invalid = |msg: String| Err(GtError::InvalidParameter(msg));
        let m = coefficients.len();
        if m == 0 || m > limits.m0 {
            return invalid(format!("family needs 1..={} forms, got {m}", limits.m0));
        }
        if offsets.len() != m {
            return invalid(format!("{m} forms but {} offsets", offsets.len()));
        }
        let t = coefficients[0].len();
        if t == 0 || t > limits.t {
            return invalid(format!("family needs 1..={} variables, got {t}", limits.t));
        }
        for (i, row) in coefficients.iter().enumerate() {
            if row.len() != t {
                return invalid(format!("form {i} has {} coefficients, expected {t}", row.len()));
            }
            if row.iter().any(|c| c.abs() > limits.l_bound) {
                return invalid(format!("form {i} has a coefficient above {}", limits.l_bound));
            }
            if row.iter().all(|&c| c == 0) {
                return invalid(format!("form {i} has a zero coefficient vector"));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                if parallel(&coefficients[i], &coefficients[j]) {
                    return invalid(format!("forms {i} and {j} are parallel"));
                }
            }
        }
        Ok(Self {
            coefficients,
            offsets,
        })
    }

    pub fn forms(&self) -> usize {
        self.coefficients.len()
    }

    pub fn variables(&self) -> usize {
        self.coefficients[0].len()
    }

    pub fn coefficients(&self) -> &[Vec<i64>] {
        &self.coefficients
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    fn product(&self, nu: &[f64], x: &[i64]) -> f64 {
        let n = nu.len() as i64;
        let mut p = 1.0;
        for (row, &b) in self.coefficients.iter().zip(&self.offsets) {
            let v: i64 = b + row.iter().zip(x).map(|(c, xi)| c * xi).sum::<i64>();
            p *= nu[v.rem_euclid(n) as usize];
        }
        p
    }
}

pub trait FormFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn build(&self, k: u32, limits: &FormLimits) -> Result<LinearFormFamily>;
}

pub type FormRegistry = Registry<dyn FormFamily>;

/// `ψ(x) = x`.
pub struct IdentityFamily;

impl FormFamily for IdentityFamily {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn build(&self, _k: u32, limits: &FormLimits) -> Result<LinearFormFamily> {
        LinearFormFamily::new(vec![vec![1]], vec![0], limits)
    }
}

/// `ψ_j(x, t) = x + j t` for `j = 0..=k`.
pub struct ApFamily;

impl FormFamily for ApFamily {
    fn name(&self) -> &'static str {
        "ap"
    }

    fn build(&self, k: u32, limits: &FormLimits) -> Result<LinearFormFamily> {
        let rows = (0..=k as i64).map(|j| vec![1, j]).collect();
        LinearFormFamily::new(rows, vec![0; k as usize + 1], limits)
    }
}

/// `ψ_ω(x, t) = x + ω·t` for `ω ∈ {0,1}^k`.
pub struct CubeFamily;

impl FormFamily for CubeFamily {
    fn name(&self) -> &'static str {
        "cube"
    }

    fn build(&self, k: u32, limits: &FormLimits) -> Result<LinearFormFamily> {
        let k = k as usize;
        let rows = (0..1usize << k)
            .map(|w| {
                let mut row = vec![1];
                row.extend((0..k).map(|j| ((w >> j) & 1) as i64));
                row
            })
            .collect();
        LinearFormFamily::new(rows, vec![0; 1 << k], limits)
    }
}

pub fn form_family_registry() -> FormRegistry {
    let mut r = FormRegistry::new("linear-form family");
    r.register("identity", Box::new(IdentityFamily))
        .register("ap", Box::new(ApFamily))
        .register("cube", Box::new(CubeFamily));
    r
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormsEstimate {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    /// Points averaged: `N^t` when exhaustive, else the sample count.
    pub points: u64,
    pub exhaustive: bool,
}

/// `E(Π_i ν(ψ_i(x)) | x ∈ Z_N^t)`: exact when `N^t ≤ 10⁷`, otherwise a
/// seeded Monte-Carlo estimate.
pub fn verify_linear_forms(
    nu: &GridFunction,
    family: &LinearFormFamily,
    samples: usize,
    seed: u64,
) -> Result<FormsEstimate> {
    if samples < MIN_FORM_SAMPLES {
        return Err(GtError::InvalidParameter(format!(
            "linear-forms check needs at least {MIN_FORM_SAMPLES} samples, got {samples}"
        )));
    }
    let n = nu.modulus();
    let t = family.variables();
    let values = nu.values();
    let volume = (n as f64).powi(t as i32);
    if volume <= EXHAUSTIVE_LIMIT {
        let rest = (n as u64).pow(t as u32 - 1);
        let parts: Vec<f64> = (0..n as i64)
            .into_par_iter()
            .map(|x0| {
                let mut x = vec![0i64; t];
                x[0] = x0;
                let mut sum = 0.0;
                for mut idx in 0..rest {
                    for xi in x[1..].iter_mut() {
                        *xi = (idx % n as u64) as i64;
                        idx /= n as u64;
                    }
                    sum += family.product(values, &x);
                }
                sum
            })
            .collect();
        return Ok(FormsEstimate {
            n,
            estimate: parts.iter().sum::<f64>() / volume,
            stderr: 0.0,
            points: volume as u64,
            exhaustive: true,
        });
    }
    let est = monte_carlo(samples, seed, |rng| {
        let x: Vec<i64> = (0..t).map(|_| rng.gen_range(0..n as i64)).collect();
        family.product(values, &x)
    });
    Ok(FormsEstimate {
        n,
        estimate: est.mean,
        stderr: est.stderr,
        points: samples as u64,
        exhaustive: false,
    })
}
