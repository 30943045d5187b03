//! The normalized bump `χ(x) = c·exp(−1/(1−x²))` on `(−1, 1)`.

use crate::error::{GtError, Result};

const ADAPTIVE_TOL: f64 = 1e-13;
const MAX_DEPTH: u32 = 50;
const FIXED_STEPS: usize = 200_000;
/// Agreement required between the adaptive and fixed-step quadratures.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// Unnormalized bump `exp(−1/(1−x²))`.
fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    (-1.0 / (1.0 - x * x)).exp()
}

fn bump_derivative(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let u = 1.0 / (1.0 - x * x);
    -2.0 * x * u * u * (-u).exp()
}

fn squared_derivative(x: f64) -> f64 {
    let d = bump_derivative(x);
    d * d
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothCutoff {
    c: f64,
}

impl SmoothCutoff {
    /// Builds the cutoff with a given normalization, without checking it.
    pub fn with_normalization(c: f64) -> Self {
        Self { c }
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn value(&self, x: f64) -> f64 {
        self.c * bump(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.c * bump_derivative(x)
    }

    /// `χ(0) = c/e`.
    pub fn at_zero(&self) -> f64 {
        self.c * (-1.0f64).exp()
    }

    /// `∫₀^∞ χ′(x)² dx` by fixed-step composite Simpson.
    pub fn energy(&self) -> f64 {
        self.c * self.c * simpson_fixed(squared_derivative, 0.0, 1.0, FIXED_STEPS)
    }
}

/// The cutoff normalized so that `∫₀^∞ χ′² = 1`.
pub fn make_cutoff() -> Result<SmoothCutoff> {
    let integral = adaptive_simpson(squared_derivative, 0.0, 1.0, ADAPTIVE_TOL)?;
    if !(integral.is_finite() && integral > 0.0) {
        return Err(GtError::Quadrature(format!("bad integral {integral}")));
    }
    let cutoff = SmoothCutoff::with_normalization(integral.sqrt().recip());
    let check = cutoff.energy();
    if (check - 1.0).abs() > CROSS_CHECK_TOL {
        return Err(GtError::Quadrature(format!(
            "fixed-step check gives {check}, expected 1"
        )));
    }
    Ok(cutoff)
}

pub(crate) fn simpson_fixed(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let steps = steps + steps % 2;
    let h = (b - a) / steps as f64;
    let mut sum = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

pub(crate) fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(GtError::Quadrature(format!(
            "adaptive Simpson did not converge on [{a}, {b}]"
        )));
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}
