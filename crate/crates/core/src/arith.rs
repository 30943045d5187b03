//! Elementary number theory: a linear sieve for primality, Möbius μ and
//! Euler φ, a Chebyshev sanity bracket, and the W-trick parameters.

use crate::error::{GtError, Result};

/// Default memory ceiling for [`build_sieve`], in bytes.
pub const DEFAULT_SIEVE_BUDGET: u64 = 2 << 30;

/// Lower Chebyshev constant: `π(x) ≥ C1 · x / ln x`.
pub const CHEBYSHEV_C1: f64 = 0.9;
/// Upper Chebyshev constant: `π(x) ≤ C2 · x / ln x`.
pub const CHEBYSHEV_C2: f64 = 1.11;
/// Smallest x from which the (C1, C2) bracket holds; checked by sieve scan
/// through 10^7. Below it the upper bound fails at many points (x = 100 has
/// π = 25 > 24.1).
pub const CHEBYSHEV_VALID_FROM: u64 = 61_732;

/// Cap on the smallness cutoff w so that W divides 210.
pub const W_CAP: f64 = 4.5;

#[derive(Clone, Debug, PartialEq)]
pub struct SieveTables {
    limit: u64,
    composite_bits: Vec<u64>,
    mobius: Vec<i8>,
    phi: Vec<u32>,
    primes: Vec<u32>,
}

fn estimated_bytes(limit: u64) -> u64 {
    // bitset + μ + φ + roughly 1.3·limit/ln(limit) primes as u32
    let primes = if limit > 16 {
        (1.3 * limit as f64 / (limit as f64).ln()) as u64
    } else {
        8
    };
    limit / 8 + limit + 4 * limit + 4 * primes
}

pub fn build_sieve(limit: u64) -> Result<SieveTables> {
    build_sieve_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

/// Linear (Euler) sieve over `0..=limit`, filling μ and φ multiplicatively.
pub fn build_sieve_with_budget(limit: u64, budget_bytes: u64) -> Result<SieveTables> {
    if limit < 2 {
        return Err(GtError::InvalidParameter(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    if limit >= u32::MAX as u64 {
        return Err(GtError::InvalidParameter(format!(
            "sieve limit {limit} exceeds the 32-bit table range"
        )));
    }
    let bytes = estimated_bytes(limit);
    if bytes > budget_bytes {
        return Err(GtError::infeasible(
            format!("sieve up to {limit} (bytes)"),
            bytes as f64,
            budget_bytes as f64,
        ));
    }

    let n = limit as usize;
    let mut composite_bits = vec![0u64; n / 64 + 1];
    let mut mobius = vec![0i8; n + 1];
    let mut phi = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mobius[1] = 1;
    phi[1] = 1;
    // 0 and 1 are not prime
    composite_bits[0] |= 0b11;

    for i in 2..=n {
        if composite_bits[i / 64] >> (i % 64) & 1 == 0 {
            primes.push(i as u32);
            mobius[i] = -1;
            phi[i] = (i - 1) as u32;
        }
        for &p in &primes {
            let p = p as usize;
            let m = i * p;
            if m > n {
                break;
            }
            composite_bits[m / 64] |= 1 << (m % 64);
            if i % p == 0 {
                mobius[m] = 0;
                phi[m] = phi[i] * p as u32;
                break;
            }
            mobius[m] = -mobius[i];
            phi[m] = phi[i] * (p as u32 - 1);
        }
    }

    Ok(SieveTables {
        limit,
        composite_bits,
        mobius,
        phi,
        primes,
    })
}

impl SieveTables {
    /// Reassembles tables from raw parts, as read back from a cache file.
    pub(crate) fn from_parts(limit: u64, is_prime: Vec<bool>, mobius: Vec<i8>, phi: Vec<u32>) -> Result<Self> {
        let n = limit as usize;
        if is_prime.len() != n + 1 || mobius.len() != n + 1 || phi.len() != n + 1 {
            return Err(GtError::Format("sieve table lengths disagree with limit".into()));
        }
        let mut composite_bits = vec![0u64; n / 64 + 1];
        let mut primes = Vec::new();
        for (i, &p) in is_prime.iter().enumerate() {
            if p {
                primes.push(i as u32);
            } else {
                composite_bits[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(Self {
            limit,
            composite_bits,
            mobius,
            phi,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        let n = n as usize;
        self.composite_bits[n / 64] >> (n % 64) & 1 == 0
    }

    /// μ(n) for `1 ≤ n ≤ limit`. There is no μ(0); asking for it panics.
    pub fn mobius(&self, n: u64) -> i8 {
        assert!(n >= 1, "the Möbius function is defined for n >= 1");
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        self.mobius[n as usize]
    }

    pub fn phi(&self, n: u64) -> u64 {
        assert!(n >= 1, "Euler's phi is defined for n >= 1");
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        self.phi[n as usize] as u64
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub(crate) fn mobius_table(&self) -> &[i8] {
        &self.mobius
    }

    pub(crate) fn phi_table(&self) -> &[u32] {
        &self.phi
    }

    /// π(x).
    pub fn prime_count(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "{x} is beyond the sieve limit {}", self.limit);
        self.primes.partition_point(|&p| p as u64 <= x) as u64
    }

    pub fn chebyshev_check(&self, x: u64) -> Result<ChebyshevBracket> {
        if x < 2 {
            return Err(GtError::InvalidParameter("Chebyshev check needs x >= 2".into()));
        }
        if x > self.limit {
            return Err(GtError::Coverage {
                needed: x,
                have: self.limit,
            });
        }
        let base = x as f64 / (x as f64).ln();
        Ok(ChebyshevBracket {
            x,
            pi_x: self.prime_count(x),
            lower: CHEBYSHEV_C1 * base,
            upper: CHEBYSHEV_C2 * base,
        })
    }

    pub fn ensure_covers(&self, needed: u64) -> Result<()> {
        if needed > self.limit {
            return Err(GtError::Coverage {
                needed,
                have: self.limit,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChebyshevBracket {
    pub x: u64,
    pub pi_x: u64,
    pub lower: f64,
    pub upper: f64,
}

impl ChebyshevBracket {
    pub fn holds(&self) -> bool {
        self.lower <= self.pi_x as f64 && self.pi_x as f64 <= self.upper
    }
}

/// π(x) with the bracket `(C1 x/ln x, C2 x/ln x)`.
pub fn chebyshev_check(x: u64) -> Result<ChebyshevBracket> {
    build_sieve(x.max(2))?.chebyshev_check(x)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn next_prime_at_least(n: u64) -> u64 {
    let mut m = n.max(2);
    while !is_prime_u64(m) {
        m += 1;
    }
    m
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primes `≤ w` by trial division (w is tiny here).
fn primes_up_to(w: f64) -> Vec<u64> {
    let top = w.floor().max(0.0) as u64;
    (2..=top).filter(|&p| is_prime_u64(p)).collect()
}

/// Everything the W-trick fixes before the residue b is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusPlan {
    pub k: u32,
    /// The prime modulus N.
    pub n: u64,
    pub w: f64,
    /// Primorial of the primes `≤ w`.
    pub big_w: u64,
    pub alpha: f64,
    /// `R = N^α`.
    pub r: f64,
}

impl ModulusPlan {
    pub fn new(k: u32, n_target: u64, alpha: f64, w_override: Option<f64>) -> Result<Self> {
        if n_target < 100 {
            return Err(GtError::InvalidParameter(format!(
                "N_target must be at least 100, got {n_target}"
            )));
        }
        if !(alpha > 0.0 && alpha <= 0.25) {
            return Err(GtError::InvalidParameter(format!(
                "alpha must lie in (0, 1/4], got {alpha}"
            )));
        }
        if k < 1 {
            return Err(GtError::InvalidParameter("k must be at least 1".into()));
        }
        let n = next_prime_at_least(n_target);
        let w = match w_override {
            Some(w) if !(w.is_finite() && w > 0.0) => {
                return Err(GtError::InvalidParameter(format!("w must be positive, got {w}")))
            }
            Some(w) => w,
            None => (n as f64).ln().ln().min(W_CAP),
        };
        let big_w = primes_up_to(w).iter().product::<u64>();
        Ok(Self {
            k,
            n,
            w,
            big_w,
            alpha,
            r: (n as f64).powf(alpha),
        })
    }

    /// The largest integer `W·n + b` for `n < N`, `b < W`, plus slack.
    pub fn sieve_limit(&self) -> u64 {
        self.big_w * self.n + self.big_w
    }

    pub fn phi_ratio(&self) -> f64 {
        let primes = primes_up_to(self.w);
        primes.iter().map(|&p| (p - 1) as f64 / p as f64).product()
    }

    /// Candidate residues: `b ∈ [1, W)` coprime to W, or `{1}` when W = 1.
    pub fn candidate_residues(&self) -> Vec<u64> {
        if self.big_w == 1 {
            return vec![1];
        }
        (1..self.big_w).filter(|&b| gcd(b, self.big_w) == 1).collect()
    }

    /// `E(f | Z_N)` for the prime-supported f along `W n + b`.
    pub fn prime_mean(&self, b: u64, sieve: &SieveTables) -> Result<f64> {
        sieve.ensure_covers(self.big_w * (self.n - 1) + b)?;
        let ratio = self.phi_ratio();
        let mut total = 0.0;
        for i in 0..self.n {
            let m = self.big_w * i + b;
            if m as f64 >= self.r && sieve.is_prime(m) {
                total += ratio * (m as f64).ln();
            }
        }
        Ok(total / self.n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WTrickParams {
    pub k: u32,
    pub n: u64,
    pub w: f64,
    pub big_w: u64,
    pub alpha: f64,
    pub r: f64,
    pub b: u64,
}

impl WTrickParams {
    pub fn plan(&self) -> ModulusPlan {
        ModulusPlan {
            k: self.k,
            n: self.n,
            w: self.w,
            big_w: self.big_w,
            alpha: self.alpha,
            r: self.r,
        }
    }

    pub fn phi_ratio(&self) -> f64 {
        self.plan().phi_ratio()
    }

    pub fn log_r(&self) -> f64 {
        self.alpha * (self.n as f64).ln()
    }
}

/// Among residues coprime to W, the one maximizing `E(f|Z_N)`; ties go to the
/// smallest b.
pub fn choose_residue(plan: &ModulusPlan, sieve: &SieveTables) -> Result<u64> {
    sieve.ensure_covers(plan.sieve_limit())?;
    let mut best: Option<(u64, f64)> = None;
    for b in plan.candidate_residues() {
        let mean = plan.prime_mean(b, sieve)?;
        if best.map_or(true, |(_, m)| mean > m) {
            best = Some((b, mean));
        }
    }
    best.map(|(b, _)| b)
        .ok_or_else(|| GtError::Internal("no residue coprime to W".into()))
}

/// Builds the W-trick parameters together with the sieve they were chosen
/// against (covering `W·N + W`).
pub fn make_wtrick_params(
    k: u32,
    n_target: u64,
    alpha: f64,
    w_override: Option<f64>,
) -> Result<(WTrickParams, SieveTables)> {
    let plan = ModulusPlan::new(k, n_target, alpha, w_override)?;
    let sieve = build_sieve(plan.sieve_limit())?;
    let b = choose_residue(&plan, &sieve)?;
    Ok((
        WTrickParams {
            k: plan.k,
            n: plan.n,
            w: plan.w,
            big_w: plan.big_w,
            alpha: plan.alpha,
            r: plan.r,
            b,
        },
        sieve,
    ))
}
