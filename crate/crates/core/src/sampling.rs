//! Reproducible Monte-Carlo averaging.
//!
//! Samples are drawn in fixed-size blocks; block `i` uses a ChaCha8 stream
//! keyed by `(seed, i)`. Blocks may run in parallel and are merged in index
//! order, so a given `(samples, seed)` always yields the same bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK: usize = 4096;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        count: 0.0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

/// Mean and standard error of `draw` over `samples` independent draws.
pub fn monte_carlo<F>(samples: usize, seed: u64, draw: F) -> MeanEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    let partials: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let take = BLOCK.min(samples - b * BLOCK);
            let mut m = Moments::EMPTY;
            for _ in 0..take {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    let total = partials.into_iter().fold(Moments::EMPTY, Moments::merge);
    let variance = if total.count > 1.0 {
        total.m2 / (total.count - 1.0)
    } else {
        0.0
    };
    MeanEstimate {
        mean: total.mean,
        stderr: (variance.max(0.0) / total.count.max(1.0)).sqrt(),
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_draws_have_zero_stderr() {
        let e = monte_carlo(10_000, 1, |_| 2.5);
        assert_eq!(e.mean, 2.5);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = monte_carlo(20_000, 7, |r| r.gen::<f64>());
        let b = monte_carlo(20_000, 7, |r| r.gen::<f64>());
        let c = monte_carlo(20_000, 8, |r| r.gen::<f64>());
        assert_eq!(a, b);
        assert_ne!(a.mean, c.mean);
        // uniform(0,1): mean 1/2, sd 1/sqrt(12)
        assert!((a.mean - 0.5).abs() < 4.0 * a.stderr);
        assert!((a.stderr - (1.0f64 / 12.0).sqrt() / (20_000f64).sqrt()).abs() < 1e-4);
    }
}
