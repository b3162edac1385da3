//! Monte Carlo estimate of the disjointness probability under the uniform
//! random-subset model; an oracle for [`crate::probmodel::exact_disjoint_prob`].
//!
//! Trial `i` draws from its own ChaCha8 stream seeded with
//! `substream_seed(seed, i)`, so the estimate depends only on the inputs and
//! not on how trials are split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::substream_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Scratch space for drawing subsets of `{0, …, n−1}`.
struct Sampler {
    pool: Vec<u32>,
    marked: Vec<bool>,
}

impl Sampler {
    fn new(n: usize) -> Self {
        Self {
            pool: (0..n as u32).collect(),
            marked: vec![false; n],
        }
    }

    fn disjoint_trial<R: Rng>(&mut self, k1: usize, k2: usize, rng: &mut R) -> bool {
        for &x in partial_shuffle(&mut self.pool, k1, rng) {
            self.marked[x as usize] = true;
        }
        let first: Vec<u32> = self.pool[..k1].to_vec();
        let hit = partial_shuffle(&mut self.pool, k2, rng)
            .iter()
            .any(|&x| self.marked[x as usize]);
        for x in first {
            self.marked[x as usize] = false;
        }
        !hit
    }
}

/// Partial Fisher–Yates: the first `k` slots become a uniform `k`-subset.
/// Any permutation of the pool is a valid starting state.
fn partial_shuffle<'a, R: Rng>(pool: &'a mut [u32], k: usize, rng: &mut R) -> &'a [u32] {
    let n = pool.len();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    &pool[..k]
}

fn count_disjoint(n: u64, k1: u64, k2: u64, seed: u64, trials: std::ops::Range<u64>) -> u64 {
    let mut sampler = Sampler::new(n as usize);
    trials
        .filter(|&i| {
            // Reset so each trial's result depends only on its own stream.
            for (slot, v) in sampler.pool.iter_mut().zip(0u32..) {
                *slot = v;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, i));
            sampler.disjoint_trial(k1 as usize, k2 as usize, &mut rng)
        })
        .count() as u64
}

pub fn mc_disjoint(n: u64, k1: u64, k2: u64, trials: u64, seed: u64) -> Result<McEstimate> {
    mc_disjoint_sharded(n, k1, k2, trials, seed, 1)
}

/// As [`mc_disjoint`], with the trial indices split into `shards` contiguous
/// blocks on scoped threads. The disjoint count is summed exactly.
pub fn mc_disjoint_sharded(
    n: u64,
    k1: u64,
    k2: u64,
    trials: u64,
    seed: u64,
    shards: usize,
) -> Result<McEstimate> {
    if k1 > n || k2 > n {
        return Err(Error::Domain(format!("subset sizes ({k1}, {k2}) exceed n = {n}")));
    }
    if n > u32::MAX as u64 {
        return Err(Error::Domain(format!("n = {n} is too large to sample")));
    }
    if trials == 0 {
        return Err(Error::Usage("at least one trial is required".into()));
    }
    if shards == 0 {
        return Err(Error::Usage("at least one shard is required".into()));
    }
    let shards = (shards as u64).min(trials);
    let chunk = trials.div_ceil(shards);
    let blocks: Vec<_> = (0..shards)
        .map(|s| s * chunk..((s + 1) * chunk).min(trials))
        .filter(|r| !r.is_empty())
        .collect();
    let hits: u64 = if blocks.len() == 1 {
        count_disjoint(n, k1, k2, seed, blocks[0].clone())
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .into_iter()
                .map(|r| scope.spawn(move || count_disjoint(n, k1, k2, seed, r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("Monte Carlo shard panicked"))
                .sum()
        })
    };
    let p_hat = hits as f64 / trials as f64;
    Ok(McEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        trials,
        seed,
    })
}
