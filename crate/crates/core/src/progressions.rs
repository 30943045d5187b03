//! Arithmetic progressions: the averages `E f₀(x) f₁(x+t) ⋯ f_k(x+kt)` over
//! `Z_N²`, the lift of short progressions mod N back to the integers, and
//! exact search for progressions of primes.

use std::fmt;

use rayon::prelude::*;

use crate::arith::SieveTables;
use crate::error::{gate, GtError, Result};
use crate::gowers::{GowersEvaluator, GowersOrder};
use crate::zn::GridFunction;

/// Ceiling on `N²k` for [`ap_expectation`].
pub const AP_BUDGET: f64 = 1e10;
/// Default allowance for the vanishing term in the von Neumann bound.
pub const VON_NEUMANN_SLACK: f64 = 0.2;

fn check_family(fs: &[GridFunction], k: usize) -> Result<usize> {
    if fs.len() != k + 1 {
        return Err(GtError::InvalidParameter(format!(
            "progressions of length {} need {} functions, got {}",
            k + 1,
            k + 1,
            fs.len()
        )));
    }
    for f in &fs[1..] {
        fs[0].check_modulus(f)?;
    }
    Ok(fs[0].modulus())
}

/// `E(f₀(x) f₁(x+t) ⋯ f_k(x+kt) | x, t ∈ Z_N)`, computed exactly.
pub fn ap_expectation(fs: &[GridFunction], k: usize) -> Result<f64> {
    let n = check_family(fs, k)?;
    gate(
        "progression average",
        (n as f64).powi(2) * k as f64,
        AP_BUDGET,
    )?;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut pos = vec![x; k + 1];
            let mut row = 0.0;
            for _t in 0..n {
                let mut p = 1.0;
                for (j, f) in fs.iter().enumerate() {
                    p *= f.values()[pos[j]];
                }
                row += p;
                for (j, slot) in pos.iter_mut().enumerate().skip(1) {
                    *slot += j;
                    while *slot >= n {
                        *slot -= n;
                    }
                }
            }
            row
        })
        .collect();
    Ok(rows.iter().sum::<f64>() / (n as f64 * n as f64))
}

/// The `t = 0` part of [`ap_expectation`]: `N^{-2} Σ_x Π_j f_j(x)`.
pub fn diagonal_contribution(fs: &[GridFunction], k: usize) -> Result<f64> {
    let n = check_family(fs, k)?;
    let total: f64 = (0..n).map(|x| fs.iter().map(|f| f.values()[x]).product::<f64>()).sum();
    Ok(total / (n as f64 * n as f64))
}

/// First `(x, t)` with `t ≠ 0` in lexicographic order at which every
/// `f_j(x + jt)` is nonzero.
pub fn nondegenerate_support(fs: &[GridFunction], k: usize) -> Result<Option<(usize, usize)>> {
    let n = check_family(fs, k)?;
    for x in 0..n {
        if fs[0].values()[x] == 0.0 {
            continue;
        }
        for t in 1..n {
            if fs.iter().enumerate().all(|(j, f)| f.values()[(x + j * t) % n] != 0.0) {
                return Ok(Some((x, t)));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VonNeumannReport {
    pub lhs: f64,
    /// `2^{k+1} min_j ⟦f_j⟧_k + slack`.
    pub bound: f64,
    pub slack: f64,
    pub norms: Vec<f64>,
    pub holds: bool,
}

/// Compares `|E Π_j f_j(x+jt)|` with `2^{k+1} min_j ⟦f_j⟧_k + slack` for
/// functions with `|f_j| ≤ 1 + ν`.
pub fn von_neumann_check(
    fs: &[GridFunction],
    nu: &GridFunction,
    k: usize,
    slack: f64,
    norm: &dyn GowersEvaluator,
) -> Result<VonNeumannReport> {
    check_family(fs, k)?;
    for (j, f) in fs.iter().enumerate() {
        f.check_modulus(nu)?;
        if let Some(x) = f
            .values()
            .iter()
            .zip(nu.values())
            .position(|(v, w)| v.abs() > 1.0 + w)
        {
            return Err(GtError::Precondition(format!("|f_{j}| > 1 + ν at {x}")));
        }
    }
    let lhs = ap_expectation(fs, k)?.abs();
    let order = GowersOrder::new(k as u32)?;
    let norms = fs.iter().map(|f| norm.norm(f, order)).collect::<Result<Vec<_>>>()?;
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = (1u64 << (k + 1)) as f64 * min + slack;
    Ok(VonNeumannReport {
        lhs,
        bound,
        slack,
        norms,
        holds: lhs <= bound,
    })
}

/// Half-open `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn contains(&self, x: usize) -> bool {
        self.start <= x && x < self.end
    }

    pub fn indicator(&self, n: usize) -> Result<GridFunction> {
        GridFunction::from_fn(n, |x| if self.contains(x) { 1.0 } else { 0.0 })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalChoice {
    pub interval: Interval,
    /// `E(1_J f)`.
    pub mean: f64,
}

/// The three near-equal thirds of `[0, N)`.
pub fn thirds(n: usize) -> [Interval; 3] {
    let cut = |i: usize| i * n / 3;
    [0, 1, 2].map(|i| Interval {
        start: cut(i),
        end: cut(i + 1),
    })
}

/// Splits `[0, N)` into thirds and returns the one carrying the most of
/// `E(f)`, leftmost on ties. For N ≥ 5 each third is shorter than N/2.
pub fn select_interval(f: &GridFunction, delta: f64) -> Result<IntervalChoice> {
    let n = f.modulus();
    if n < 5 {
        return Err(GtError::InvalidParameter(format!("need N ≥ 5, got {n}")));
    }
    if f.expectation() < delta {
        return Err(GtError::Precondition(format!(
            "E(f) = {} is below δ = {delta}",
            f.expectation()
        )));
    }
    let mut best: Option<IntervalChoice> = None;
    for interval in thirds(n) {
        let mean = f.values()[interval.start..interval.end].iter().sum::<f64>() / n as f64;
        if best.map_or(true, |b| mean > b.mean) {
            best = Some(IntervalChoice { interval, mean });
        }
    }
    Ok(best.expect("three intervals"))
}

/// A progression of integers, stored increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APWitness {
    pub start: u64,
    pub difference: u64,
    pub terms: Vec<u64>,
}

impl APWitness {
    pub fn new(start: u64, difference: u64, len: usize) -> Self {
        Self {
            start,
            difference,
            terms: (0..len as u64).map(|j| start + j * difference).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for APWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(u64::to_string).collect();
        f.write_str(&terms.join(","))
    }
}

/// Lifts `x, x+t, …, x+kt (mod N)`, all inside `J` with `|J| < N/2`, to the
/// integer progression they come from.
pub fn lift_ap(x: usize, t: usize, k: usize, n: usize, j: Interval) -> Result<APWitness> {
    let t = t % n;
    if t == 0 {
        return Err(GtError::Precondition("difference is 0 mod N".into()));
    }
    if 2 * j.len() >= n {
        return Err(GtError::Precondition(format!("interval {j} is not shorter than N/2")));
    }
    let residues: Vec<usize> = (0..=k).map(|i| (x + i * t) % n).collect();
    if let Some(r) = residues.iter().find(|&&r| !j.contains(r)) {
        return Err(GtError::Precondition(format!("residue {r} lies outside {j}")));
    }
    let d = if 2 * t < n { t as i64 } else { t as i64 - n as i64 };
    for w in residues.windows(2) {
        if w[1] as i64 - w[0] as i64 != d {
            return Err(GtError::Internal(format!("residues {w:?} do not step by {d}")));
        }
    }
    let first = *residues.iter().min().expect("k + 1 terms");
    Ok(APWitness::new(first as u64, d.unsigned_abs(), k + 1))
}

/// One pass of the interval argument on a nonnegative f along `W n + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub choice: IntervalChoice,
    /// `E Π_j (1_J f)(x + jt)`.
    pub expectation: f64,
    pub diagonal: f64,
    /// `expectation − diagonal`: the part carried by `t ≠ 0`.
    pub residual: f64,
    /// The first `(x, t)`, `t ≠ 0`, counted in the residual.
    pub support: Option<(usize, usize)>,
    /// The lifted progression of indices n.
    pub indices: Option<APWitness>,
    /// The same progression mapped to the integers `W n + b`.
    pub integers: Option<APWitness>,
}

/// Selects the heaviest third J, averages progressions of `1_J f`, removes
/// the `t = 0` slice and lifts the first nondegenerate progression found to
/// the integers `W n + b`.
pub fn interval_pipeline(f: &GridFunction, k: usize, big_w: u64, b: u64) -> Result<PipelineReport> {
    if let Some(x) = f.values().iter().position(|&v| v < 0.0) {
        return Err(GtError::Precondition(format!("f is negative at {x}")));
    }
    let n = f.modulus();
    let choice = select_interval(f, f.expectation())?;
    let restricted = &choice.interval.indicator(n)? * f;
    let fs = vec![restricted; k + 1];
    let expectation = ap_expectation(&fs, k)?;
    let diagonal = diagonal_contribution(&fs, k)?;
    let support = nondegenerate_support(&fs, k)?;
    let indices = support
        .map(|(x, t)| lift_ap(x, t, k, n, choice.interval))
        .transpose()?;
    let integers = indices
        .as_ref()
        .map(|w| APWitness::new(big_w * w.start + b, big_w * w.difference, w.len()));
    Ok(PipelineReport {
        choice,
        expectation,
        diagonal,
        residual: expectation - diagonal,
        support,
        indices,
        integers,
    })
}

fn ap_is_prime(sieve: &SieveTables, a: u64, t: u64, len: usize) -> bool {
    (1..len as u64).all(|j| sieve.is_prime(a + j * t))
}

fn check_search(sieve: &SieveTables, limit: u64, len: usize) -> Result<()> {
    if len < 2 {
        return Err(GtError::InvalidParameter(format!("length must be at least 2, got {len}")));
    }
    sieve.ensure_covers(limit)
}

/// The lexicographically least `(a, t)`, `t ≥ 1`, with `a, a+t, …` all prime
/// and at most `limit`.
pub fn find_prime_ap(sieve: &SieveTables, limit: u64, len: usize) -> Result<Option<APWitness>> {
    check_search(sieve, limit, len)?;
    let span = len as u64 - 1;
    for &a in sieve.primes() {
        let a = a as u64;
        if a + span > limit {
            break;
        }
        let mut t = 1;
        while a + span * t <= limit {
            if ap_is_prime(sieve, a, t, len) {
                return Ok(Some(APWitness::new(a, t, len)));
            }
            t += 1;
        }
    }
    Ok(None)
}

/// Number of `(a, t)`, `t ≥ 1`, with every term prime and at most `limit`.
pub fn count_prime_aps(sieve: &SieveTables, limit: u64, len: usize) -> Result<u64> {
    check_search(sieve, limit, len)?;
    let span = len as u64 - 1;
    let starts: Vec<u64> = sieve
        .primes()
        .iter()
        .map(|&p| p as u64)
        .take_while(|&a| a + span <= limit)
        .collect();
    Ok(starts
        .par_iter()
        .map(|&a| {
            (1..=(limit - a) / span)
                .filter(|&t| ap_is_prime(sieve, a, t, len))
                .count() as u64
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::arith::build_sieve;
    use crate::gowers::SpectralNorm;

    fn brute_ap(fs: &[GridFunction]) -> f64 {
        let n = fs[0].modulus();
        let mut total = 0.0;
        for x in 0..n {
            for t in 0..n {
                total += fs.iter().enumerate().map(|(j, f)| f.values()[(x + j * t) % n]).product::<f64>();
            }
        }
        total / (n * n) as f64
    }

    fn random(n: usize, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> GridFunction {
        GridFunction::from_fn(n, |_| rng.gen_range(lo..hi)).unwrap()
    }

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    /// Every `(a, t)` progression of primes up to `limit`, by enumerating
    /// candidate terms directly.
    fn brute_prime_aps(limit: u64, len: usize) -> Vec<(u64, u64)> {
        let primes: Vec<u64> = (2..=limit).filter(|&p| trial_prime(p)).collect();
        let mut out = Vec::new();
        for &a in &primes {
            for &b in &primes {
                if b <= a {
                    continue;
                }
                let t = b - a;
                if (0..len as u64).all(|j| a + j * t <= limit && primes.binary_search(&(a + j * t)).is_ok()) {
                    out.push((a, t));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn expectation_examples() {
        let ones = vec![GridFunction::constant(13, 1.0).unwrap(); 3];
        assert!((ap_expectation(&ones, 2).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random(29, &mut rng, -1.0, 1.0);
        let k1 = ap_expectation(&[f.clone(), f.clone()], 1).unwrap();
        assert!((k1 - f.expectation().powi(2)).abs() < 1e-14);
        // {0,1,2} on Z_7: t = 0 three times, plus 0,1,2 and 2,1,0
        let g = GridFunction::indicator(7, [0, 1, 2]).unwrap();
        let e = ap_expectation(&[g.clone(), g.clone(), g.clone()], 2).unwrap();
        assert!((e - brute_ap(&[g.clone(), g.clone(), g])).abs() < 1e-15);
        assert!((e - 5.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (n, k) in [(17, 2), (31, 3), (23, 4)] {
            let fs: Vec<GridFunction> = (0..=k).map(|_| random(n, &mut rng, -2.0, 2.0)).collect();
            assert!((ap_expectation(&fs, k).unwrap() - brute_ap(&fs)).abs() < 1e-12);
        }
        let fs = vec![GridFunction::constant(5, 1.0).unwrap(); 2];
        assert!(ap_expectation(&fs, 2).is_err());
        let big = vec![GridFunction::constant(80_000, 1.0).unwrap(); 3];
        assert!(ap_expectation(&big, 2).unwrap_err().is_infeasible());
    }

    #[test]
    fn diagonal_examples() {
        let ones = vec![GridFunction::constant(50, 1.0).unwrap(); 3];
        assert!((diagonal_contribution(&ones, 2).unwrap() - 1.0 / 50.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fs: Vec<GridFunction> = (0..3).map(|_| random(40, &mut rng, -3.0, 3.0)).collect();
        let bound: f64 = fs.iter().map(GridFunction::sup_norm).product::<f64>() / 40.0;
        assert!(diagonal_contribution(&fs, 2).unwrap().abs() <= bound);
    }

    #[test]
    fn von_neumann_examples() {
        let nu = GridFunction::constant(401, 1.0).unwrap();
        let norm = SpectralNorm::default();
        let mut fs = vec![GridFunction::constant(401, 1.0).unwrap(); 3];
        let r = von_neumann_check(&fs, &nu, 2, VON_NEUMANN_SLACK, &norm).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.holds);
        fs[1] = GridFunction::constant(401, 0.0).unwrap();
        let r = von_neumann_check(&fs, &nu, 2, VON_NEUMANN_SLACK, &norm).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
        fs[1] = GridFunction::constant(401, 2.5).unwrap();
        assert!(matches!(
            von_neumann_check(&fs, &nu, 2, VON_NEUMANN_SLACK, &norm),
            Err(GtError::Precondition(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let fs: Vec<GridFunction> = (0..3).map(|_| random(401, &mut rng, -2.0, 2.0)).collect();
        assert!(von_neumann_check(&fs, &nu, 2, VON_NEUMANN_SLACK, &norm).unwrap().holds);
    }

    #[test]
    fn interval_selection() {
        let f = GridFunction::constant(300, 0.4).unwrap();
        let c = select_interval(&f, 0.4).unwrap();
        assert_eq!(c.interval, Interval { start: 0, end: 100 });
        assert!((c.mean - 0.4 / 3.0).abs() < 1e-15);
        let g = GridFunction::from_fn(101, |x| if x < 25 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(select_interval(&g, 0.2).unwrap().interval.start, 0);
        assert!(select_interval(&g, 0.3).is_err());
        assert!(select_interval(&GridFunction::constant(4, 1.0).unwrap(), 0.5).is_err());
        for n in 5..200 {
            let t = thirds(n);
            assert_eq!((t[0].start, t[2].end), (0, n));
            let lens: Vec<usize> = t.iter().map(Interval::len).collect();
            assert!(lens.iter().max().unwrap() - lens.iter().min().unwrap() <= 1);
            assert!(lens.iter().all(|&l| 2 * l < n));
        }
    }

    #[test]
    fn interval_mean_on_counts() {
        // for 0/1 functions compare counts: 3·max ≥ total
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let n = rng.gen_range(5..500);
            let f = GridFunction::from_fn(n, |_| if rng.gen::<f64>() < 0.3 { 1.0 } else { 0.0 }).unwrap();
            let total: usize = f.values().iter().filter(|&&v| v == 1.0).count();
            let delta = total as f64 / n as f64;
            let c = select_interval(&f, delta).unwrap();
            let count = f.values()[c.interval.start..c.interval.end].iter().filter(|&&v| v == 1.0).count();
            assert!(3 * count >= total);
        }
    }

    #[test]
    fn lifting_examples() {
        let j = Interval { start: 0, end: 40 };
        assert_eq!(lift_ap(0, 5, 2, 101, j).unwrap().terms, vec![0, 5, 10]);
        let w = lift_ap(30, 86, 2, 101, j).unwrap();
        assert_eq!((w.start, w.difference, w.terms.clone()), (0, 15, vec![0, 15, 30]));
        assert!(lift_ap(35, 5, 2, 101, j).is_err());
        assert!(lift_ap(3, 101, 2, 101, j).is_err());
        assert!(lift_ap(0, 1, 2, 101, Interval { start: 0, end: 60 }).is_err());
    }

    #[test]
    fn prime_ap_ground_truth() {
        let sieve = build_sieve(10_000).unwrap();
        let first = |limit, len| find_prime_ap(&sieve, limit, len).unwrap().unwrap().terms;
        assert_eq!(first(10, 3), vec![3, 5, 7]);
        assert_eq!(first(25, 4), vec![5, 11, 17, 23]);
        assert_eq!(first(30, 5), vec![5, 11, 17, 23, 29]);
        assert_eq!(find_prime_ap(&sieve, 10, 5).unwrap(), None);
        for (limit, len) in [(10u64, 3usize), (25, 4), (30, 5), (200, 3), (300, 4)] {
            let brute = brute_prime_aps(limit, len);
            let w = find_prime_ap(&sieve, limit, len).unwrap().unwrap();
            assert_eq!((w.start, w.difference), brute[0]);
            assert_eq!(count_prime_aps(&sieve, limit, len).unwrap(), brute.len() as u64);
        }
        let counts: Vec<u64> = [100, 1_000, 10_000].iter().map(|&l| count_prime_aps(&sieve, l, 3).unwrap()).collect();
        assert!(counts[0] < counts[1] && counts[1] < counts[2]);
        assert!(count_prime_aps(&sieve, 20_000, 3).is_err());
    }

    #[test]
    fn pipeline_examples() {
        // {2, 3, 4} in the first third of Z_30; along 6n + 5 these are 17, 23, 29
        let f = GridFunction::indicator(30, [2, 3, 4]).unwrap();
        let r = interval_pipeline(&f, 2, 6, 5).unwrap();
        assert_eq!(r.choice.interval, Interval { start: 0, end: 10 });
        assert!((r.expectation - 5.0 / 900.0).abs() < 1e-15);
        assert!((r.diagonal - 3.0 / 900.0).abs() < 1e-15);
        assert!(r.residual > 0.0);
        assert_eq!(r.support, Some((2, 1)));
        assert_eq!(r.indices.unwrap().terms, vec![2, 3, 4]);
        assert_eq!(r.integers.unwrap().terms, vec![17, 23, 29]);

        // two points cannot hold a nondegenerate 3-term progression mod 11
        let g = GridFunction::indicator(11, [1, 2]).unwrap();
        let r = interval_pipeline(&g, 2, 1, 0).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!((r.support, r.integers), (None, None));

        let neg = GridFunction::new(vec![1.0, -0.5, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(interval_pipeline(&neg, 2, 1, 0), Err(GtError::Precondition(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn shift_invariant(seed in 0u64..1000, s in 0i64..50) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fs: Vec<GridFunction> = (0..3).map(|_| random(37, &mut rng, -1.0, 1.0)).collect();
            let shifted: Vec<GridFunction> = fs.iter().map(|f| f.shift(s)).collect();
            prop_assert!((ap_expectation(&fs, 2).unwrap() - ap_expectation(&shifted, 2).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn multilinear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0, slot in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fs: Vec<GridFunction> = (0..3).map(|_| random(23, &mut rng, -1.0, 1.0)).collect();
            let g = random(23, &mut rng, -1.0, 1.0);
            let mut mix = fs.clone();
            mix[slot] = &fs[slot].scale(a).unwrap() + &g.scale(b).unwrap();
            let mut only_g = fs.clone();
            only_g[slot] = g;
            let lhs = ap_expectation(&mix, 2).unwrap();
            let rhs = a * ap_expectation(&fs, 2).unwrap() + b * ap_expectation(&only_g, 2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn nonnegative_on_nonnegative(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random(31, &mut rng, 0.0, 1.0);
            prop_assert!(ap_expectation(&[f.clone(), f.clone(), f], 2).unwrap() >= 0.0);
        }

        #[test]
        fn lift_inverts_reduction(start in 0usize..40, diff in 1usize..20, k in 1usize..4, up in any::<bool>()) {
            let n = 101;
            let j = Interval { start: 0, end: 50 };
            let terms: Vec<usize> = (0..=k).map(|i| start + i * diff).collect();
            prop_assume!(*terms.last().unwrap() < j.end);
            let (x, t) = if up { (start, diff) } else { (*terms.last().unwrap(), n - diff) };
            let w = lift_ap(x, t, k, n, j).unwrap();
            prop_assert_eq!(w.terms, terms.iter().map(|&v| v as u64).collect::<Vec<_>>());
        }
    }
}
