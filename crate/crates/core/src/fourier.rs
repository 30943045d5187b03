//! Normalized discrete Fourier transform on Z_N for arbitrary N.
//!
//! `f̂(ξ) = E_x f(x) e(−xξ/N)` and `f(x) = Σ_ξ f̂(ξ) e(xξ/N)`. Lengths that are
//! not powers of two go through a chirp (Bluestein) reduction to a power-of-two
//! radix-4 convolution, so prime moduli cost O(N log N) like any other.

use std::sync::Arc;

use rustfft::algorithm::{BluesteinsAlgorithm, Radix4};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection};

use crate::error::Result;
use crate::zn::GridFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn modulus(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `Σ_ξ |f̂(ξ)|^p`.
    pub fn power_sum(&self, p: i32) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr().powi(p / 2)).sum()
    }
}

/// Forward and inverse transforms of one length, reusable across calls.
pub struct FourierPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn build(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    if len.is_power_of_two() {
        if len < 4 {
            return rustfft::FftPlanner::new().plan_fft(len, direction);
        }
        return Arc::new(Radix4::new(len, direction));
    }
    let inner_len = (2 * len - 1).next_power_of_two();
    let inner: Arc<dyn Fft<f64>> = Arc::new(Radix4::new(inner_len, direction));
    Arc::new(BluesteinsAlgorithm::new(len, inner))
}

impl FourierPlan {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            forward: build(len, FftDirection::Forward),
            inverse: build(len, FftDirection::Inverse),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn forward_raw(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len, "plan length mismatch");
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn inverse_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub fn dft(&self, f: &GridFunction) -> Spectrum {
        let scale = 1.0 / self.len as f64;
        let coefficients = self
            .forward_raw(f.values())
            .into_iter()
            .map(|c| c * scale)
            .collect();
        Spectrum { coefficients }
    }

    /// Inverse transform; imaginary residue (rounding noise for spectra of
    /// real functions) is dropped.
    pub fn idft(&self, s: &Spectrum) -> Result<GridFunction> {
        assert_eq!(s.modulus(), self.len, "plan length mismatch");
        GridFunction::new(self.inverse_real(s.coefficients.clone()))
    }

    /// `result(x) = E_t a(x + t) b(t)`.
    pub fn cross_correlation(&self, a: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
        a.check_modulus(b)?;
        let fa = self.forward_raw(a.values());
        let fb = self.forward_raw(b.values());
        // Raw transforms carry a factor N each; the inverse adds none, and the
        // target is an average, so divide by N^2 overall.
        let scale = 1.0 / (self.len as f64 * self.len as f64);
        let prod = fa
            .iter()
            .zip(&fb)
            .map(|(x, y)| x * y.conj() * scale)
            .collect();
        GridFunction::new(self.inverse_real(prod))
    }

    /// `C(h) = E_x f(x) f(x + h)`.
    pub fn autocorrelation(&self, f: &GridFunction) -> Result<GridFunction> {
        let raw = self.forward_raw(f.values());
        let scale = 1.0 / (self.len as f64 * self.len as f64);
        let power = raw.iter().map(|c| Complex64::new(c.norm_sqr() * scale, 0.0)).collect();
        GridFunction::new(self.inverse_real(power))
    }

    /// `Σ_ξ |f̂(ξ)|⁴`, i.e. the fourth power of the U² norm.
    pub fn fourth_moment(&self, f: &GridFunction) -> f64 {
        let scale = 1.0 / self.len as f64;
        self.forward_raw(f.values())
            .iter()
            .map(|c| (c.norm_sqr() * scale * scale).powi(2))
            .sum()
    }
}

pub fn dft(f: &GridFunction) -> Spectrum {
    FourierPlan::new(f.modulus()).dft(f)
}

pub fn idft(s: &Spectrum) -> Result<GridFunction> {
    FourierPlan::new(s.modulus()).idft(s)
}

pub fn autocorrelation(f: &GridFunction) -> Result<GridFunction> {
    FourierPlan::new(f.modulus()).autocorrelation(f)
}

pub fn cross_correlation(a: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
    FourierPlan::new(a.modulus()).cross_correlation(a, b)
}
