//! Dense real-valued functions on the cyclic group Z_N.
//!
//! Every average in this crate is normalized by N. Index arithmetic is always
//! reduced mod N, so `f.at(-1)` is `f(N-1)`.

use std::ops::{Add, Mul, Sub};

use crate::error::{GtError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps `values` as a function on Z_N with N = `values.len()`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(GtError::InvalidParameter("modulus must be positive".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GtError::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// Indicator of the single residue `at`.
    pub fn delta(n: usize, at: usize) -> Result<Self> {
        let mut values = vec![0.0; n];
        if n > 0 {
            values[at % n] = 1.0;
        }
        Self::new(values)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn indicator(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut values = vec![0.0; n];
        for m in members {
            if n > 0 {
                values[m % n] = 1.0;
            }
        }
        Self::new(values)
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at residue `x mod N`.
    pub fn at(&self, x: i64) -> f64 {
        let n = self.values.len() as i64;
        self.values[x.rem_euclid(n) as usize]
    }

    pub fn expectation(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.modulus() as f64
    }

    /// `x -> f(x + t)`.
    pub fn shift(&self, t: i64) -> Self {
        let n = self.modulus();
        let t = t.rem_euclid(n as i64) as usize;
        let mut values = Vec::with_capacity(n);
        values.extend_from_slice(&self.values[t..]);
        values.extend_from_slice(&self.values[..t]);
        Self { values }
    }

    /// `⟨f, g⟩ = E(fg)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_modulus(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(s / self.modulus() as f64)
    }

    pub fn check_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(GtError::ModulusMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_modulus(other)?;
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// `x -> f(x) f(x + h)`, the multiplicative derivative used by the
    /// recursive norm and dual formulas.
    pub fn times_shift(&self, h: usize) -> Self {
        let n = self.modulus();
        let h = h % n;
        let values = (0..n)
            .map(|x| {
                let y = if x + h >= n { x + h - n } else { x + h };
                self.values[x] * self.values[y]
            })
            .collect();
        Self { values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `E(f²)`, the squared normalized L² norm.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.modulus() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;

    /// Panics on modulus mismatch; use [`GridFunction::zip_with`] for a
    /// fallible version.
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b)
            .expect("pointwise sum of functions on different moduli")
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;

    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b)
            .expect("pointwise difference of functions on different moduli")
    }
}

impl Mul for &GridFunction {
    type Output = GridFunction;

    fn mul(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a * b)
            .expect("pointwise product of functions on different moduli")
    }
}
