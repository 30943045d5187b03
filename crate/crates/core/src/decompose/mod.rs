//! Energy-increment decomposition `f = g + h` relative to level-set
//! partitions of dual functions.
//!
//! Each step takes the dual function `F = D f_j`, cuts `Z_N` into the cells
//! `width·(n+α) ≤ F < width·(n+1+α)` with `width = ε^{2^{k+1}}`, refines the
//! running partition B by them, removes the atoms of small `(1+ν)`-mass
//! (their union is Ω), and sets `f_{j+1} = (1−1_Ω)(f − E(f|B))`. It stops as
//! soon as `⟦f_{j+1}⟧_k ≤ ε`.

mod partition;

pub use partition::{conditional_expectation, Partition};

use rand::Rng;

use crate::error::{GtError, Result};
use crate::gowers::{DualEvaluator, GowersEvaluator, GowersOrder};
use crate::zn::GridFunction;

/// Shift candidates tried per dual function.
pub const ALPHA_CANDIDATES: usize = 20;
/// The boundary mass accepted is at most this multiple of σ.
pub const BOUNDARY_FACTOR: f64 = 10.0;
/// The energy must grow by at least `ε^{2^{k+1}}` divided by this.
pub const INCREMENT_DIVISOR: f64 = 4.0;
pub const MAX_ITER_CAP: usize = 1000;

/// Cells `width·(n+α) ≤ F < width·(n+1+α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomRule {
    pub width: f64,
    pub alpha: f64,
}

impl AtomRule {
    pub fn new(width: f64, alpha: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(GtError::InvalidParameter(format!("atom width must be positive, got {width}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(GtError::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(Self { width, alpha })
    }

    pub fn level(&self, value: f64) -> i64 {
        (value / self.width - self.alpha).floor() as i64
    }

    /// Whether `value` is within `margin·width` of a cell boundary.
    pub fn near_boundary(&self, value: f64, margin: f64) -> bool {
        let s = value / self.width - self.alpha;
        let frac = s - s.floor();
        frac < margin || frac > 1.0 - margin
    }

    pub fn partition(&self, dual: &GridFunction) -> Partition {
        Partition::from_keys(dual.values().iter().map(|&v| self.level(v)))
    }
}

/// `E(1_E (1+ν))` for the points E of `dual` near a cell boundary.
pub fn boundary_mass(dual: &GridFunction, nu: &GridFunction, rule: &AtomRule, sigma: f64) -> f64 {
    let total: f64 = dual
        .values()
        .iter()
        .zip(nu.values())
        .filter(|(&v, _)| rule.near_boundary(v, sigma))
        .map(|(_, &w)| 1.0 + w)
        .fold(0.0, |a, b| a + b);
    total / dual.modulus() as f64
}

/// Tries [`ALPHA_CANDIDATES`] shifts uniform in (0, 1] and keeps the one with
/// the least boundary mass; fails if even that exceeds `10σ`.
pub fn choose_alpha(
    dual: &GridFunction,
    nu: &GridFunction,
    width: f64,
    sigma: f64,
    rng: &mut impl Rng,
) -> Result<(AtomRule, f64)> {
    // Beyond 2^52 cells per unit the fractional position of F is lost.
    let cells = dual.sup_norm() / width;
    if cells > 2f64.powi(52) {
        return Err(GtError::InvalidParameter(format!(
            "atom width {width:e} is below the floating-point resolution of dual values up to {:e}",
            dual.sup_norm()
        )));
    }
    let mut best: Option<(AtomRule, f64)> = None;
    for _ in 0..ALPHA_CANDIDATES {
        let rule = AtomRule::new(width, 1.0 - rng.gen::<f64>())?;
        let mass = boundary_mass(dual, nu, &rule, sigma);
        if best.map_or(true, |(_, m)| mass < m) {
            best = Some((rule, mass));
        }
    }
    let (rule, mass) = best.expect("at least one candidate");
    let budget = BOUNDARY_FACTOR * sigma;
    if mass > budget {
        return Err(GtError::BoundaryBudget { best: mass, budget });
    }
    Ok((rule, mass))
}

/// Indicator of the union of atoms with `E((1+ν)1_A) < σ^{1/2}`.
pub fn bad_atoms(b: &Partition, nu: &GridFunction, sigma: f64) -> Result<GridFunction> {
    let mass = b.atom_sums(&nu.map(|v| 1.0 + v)?)?;
    let n = b.modulus() as f64;
    let threshold = sigma.sqrt();
    let bad: Vec<bool> = mass.iter().map(|m| m / n < threshold).collect();
    GridFunction::new(b.labels().iter().map(|&l| if bad[l as usize] { 1.0 } else { 0.0 }).collect())
}

#[derive(Clone, Debug)]
pub struct LevelPartition {
    pub partition: Partition,
    pub omega: GridFunction,
    pub rules: Vec<AtomRule>,
    pub boundary_masses: Vec<f64>,
}

fn check_approximation(duals: &[GridFunction], b: &Partition, width: f64) -> Result<()> {
    for (i, dual) in duals.iter().enumerate() {
        let e = conditional_expectation(dual, b)?;
        let worst = (dual - &e).sup_norm();
        if worst > width {
            return Err(GtError::Internal(format!(
                "dual {i} deviates from its atom averages by {worst:e} > {width:e}"
            )));
        }
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(GtError::InvalidParameter(format!("sigma must lie in (0, 1/2), got {sigma}")));
    }
    Ok(())
}

/// Joint level partition of several dual functions, each with its own α.
pub fn build_level_partition(
    duals: &[GridFunction],
    epsilon: f64,
    k: u32,
    sigma: f64,
    nu: &GridFunction,
    rng: &mut impl Rng,
) -> Result<LevelPartition> {
    check_sigma(sigma)?;
    if !(epsilon > 0.0) {
        return Err(GtError::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let width = atom_width(epsilon, k);
    let mut partition = Partition::trivial(nu.modulus());
    let mut rules = Vec::with_capacity(duals.len());
    let mut boundary_masses = Vec::with_capacity(duals.len());
    for dual in duals {
        dual.check_modulus(nu)?;
        let (rule, mass) = choose_alpha(dual, nu, width, sigma, rng)?;
        partition = partition.join(&rule.partition(dual))?;
        rules.push(rule);
        boundary_masses.push(mass);
    }
    check_approximation(duals, &partition, width)?;
    let omega = bad_atoms(&partition, nu, sigma)?;
    Ok(LevelPartition {
        partition,
        omega,
        rules,
        boundary_masses,
    })
}

/// `ε^{2^{k+1}}`.
pub fn atom_width(epsilon: f64, k: u32) -> f64 {
    epsilon.powi(1 << (k + 1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposeParams {
    pub k: u32,
    pub epsilon: f64,
    /// Defaults to `ε^{2^{k+2}}`.
    pub sigma: Option<f64>,
    /// Defaults to `1 + ⌈4 E(f²) / ε^{2^{k+1}}⌉`, capped at 1000.
    pub max_iter: Option<usize>,
}

impl DecomposeParams {
    pub fn new(k: u32, epsilon: f64) -> Self {
        Self {
            k,
            epsilon,
            sigma: None,
            max_iter: None,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or_else(|| self.epsilon.powi(1 << (self.k + 2)))
    }

    pub fn max_iter(&self, f: &GridFunction) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let bound = 4.0 * f.energy() / atom_width(self.epsilon, self.k);
            (1.0 + bound.ceil()).min(MAX_ITER_CAP as f64) as usize
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// `E(ν 1_Ω)`.
    pub nu_on_omega: f64,
    /// `‖(1−1_Ω) E(ν−1|B)‖_∞`.
    pub nu_deviation: f64,
    /// `⟦h⟧_k`.
    pub h_norm: f64,
    /// `‖g‖_∞`.
    pub g_sup: f64,
}

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub partition: Partition,
    pub omega: GridFunction,
    pub g: GridFunction,
    pub h: GridFunction,
    pub iterations: usize,
    /// `‖(1−1_Ω_j) E(f|B_j)‖²` for `j = 1..=iterations`.
    pub energies: Vec<f64>,
    /// `⟦f_{j+1}⟧_k` after each step.
    pub norms: Vec<f64>,
    pub rules: Vec<AtomRule>,
    pub boundary_masses: Vec<f64>,
    pub sigma: f64,
    pub width: f64,
    pub diagnostics: Diagnostics,
}

/// Largest power of two dividing the float `f ≠ 0`.
fn quantum(f: f64) -> f64 {
    let bits = f.abs().to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, shift) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    2f64.powi(shift + mantissa.trailing_zeros() as i32)
}

/// Splits `f` as `g + h` exactly in floating point with `g ≈ e`.
///
/// `g = e` when `f − e` is exact; otherwise e is rounded to the binary grid
/// of f, on which the subtraction is exact.
fn split_exact(f: f64, e: f64) -> Result<(f64, f64)> {
    let h = f - e;
    if e + h == f {
        return Ok((e, h));
    }
    let q = quantum(f);
    let g = (e / q).round() * q;
    let h = f - g;
    if g + h == f && f - h == g {
        return Ok((g, h));
    }
    Err(GtError::Internal(format!("cannot split {f} exactly around {e}")))
}

pub fn decompose(
    f: &GridFunction,
    nu: &GridFunction,
    params: &DecomposeParams,
    norm: &dyn GowersEvaluator,
    dual: &dyn DualEvaluator,
    rng: &mut impl Rng,
) -> Result<DecompositionResult> {
    f.check_modulus(nu)?;
    if let Some(x) = f
        .values()
        .iter()
        .zip(nu.values())
        .position(|(&fv, &nv)| !(0.0 <= fv && fv <= nv))
    {
        return Err(GtError::Precondition(format!("0 ≤ f ≤ ν fails at {x}")));
    }
    let order = GowersOrder::new(params.k)?;
    let eps = params.epsilon;
    if !(eps > 0.0) {
        return Err(GtError::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    let sigma = params.sigma();
    check_sigma(sigma)?;
    let width = atom_width(eps, params.k);
    let required = width / INCREMENT_DIVISOR;
    let max_iter = params.max_iter(f);

    let n = f.modulus();
    let mut partition = Partition::trivial(n);
    let mut duals = Vec::new();
    let mut rules = Vec::new();
    let mut boundary_masses = Vec::new();
    let mut energies: Vec<f64> = Vec::new();
    let mut norms = Vec::new();
    let mut current = f.clone();

    for step in 1..=max_iter {
        let dual_fn = dual.evaluate(&current, order)?;
        let (rule, mass) = choose_alpha(&dual_fn, nu, width, sigma, rng)?;
        partition = partition.join(&rule.partition(&dual_fn))?;
        duals.push(dual_fn);
        rules.push(rule);
        boundary_masses.push(mass);
        check_approximation(&duals, &partition, width)?;

        let omega = bad_atoms(&partition, nu, sigma)?;
        let e = conditional_expectation(f, &partition)?;
        let keep: Vec<bool> = omega.values().iter().map(|&o| o == 0.0).collect();
        let (g_values, h_values): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|x| {
                if keep[x] {
                    split_exact(f.values()[x], e.values()[x])
                } else {
                    Ok((0.0, 0.0))
                }
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        let g = GridFunction::new(g_values)?;
        let h = GridFunction::new(h_values)?;
        let energy = g.energy();
        if let Some(&last) = energies.last() {
            if energy - last < required {
                return Err(GtError::EnergyIncrement {
                    step,
                    gain: energy - last,
                    required,
                });
            }
        }
        energies.push(energy);

        let h_norm = norm.norm(&h, order)?;
        norms.push(h_norm);
        if h_norm <= eps {
            let nu_on_omega = nu.inner(&omega)?;
            let nu_dev = conditional_expectation(&nu.map(|v| v - 1.0)?, &partition)?;
            let nu_deviation = nu_dev
                .values()
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(v, _)| v.abs())
                .fold(0.0, f64::max);
            let g_sup = g.sup_norm();
            return Ok(DecompositionResult {
                partition,
                omega,
                g,
                h,
                iterations: step,
                energies,
                norms,
                rules,
                boundary_masses,
                sigma,
                width,
                diagnostics: Diagnostics {
                    nu_on_omega,
                    nu_deviation,
                    h_norm,
                    g_sup,
                },
            });
        }
        current = h;
    }
    Err(GtError::MaxIterations(max_iter))
}
