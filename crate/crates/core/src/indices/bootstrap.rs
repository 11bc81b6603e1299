//! Percentile bootstrap for the mean citation count of a cohort.
//!
//! Replicate `i` draws from its own ChaCha8 stream seeded with `seed + i`, so
//! the result does not depend on how replicates are scheduled across threads.
//! Endpoints are order statistics of the replicate means and therefore exact
//! rationals.

use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::IndexError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: Rational64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub const DEFAULT_REPLICATES: usize = 1000;

    pub fn with_seed(seed: u64) -> Self {
        BootstrapConfig {
            replicates: Self::DEFAULT_REPLICATES,
            level: Rational64::new(95, 100),
            seed,
        }
    }
}

pub fn bootstrap_ci(
    counts: &[u64],
    level: Rational64,
    replicates: usize,
    seed: u64,
) -> Result<(Rational64, Rational64), IndexError> {
    if counts.is_empty() {
        return Err(IndexError::EmptyCohort);
    }
    if replicates == 0 {
        return Err(IndexError::InvalidSpec(
            "replicates must be at least 1".into(),
        ));
    }
    if level <= Rational64::zero() || level > Rational64::one() {
        return Err(IndexError::InvalidSpec(format!(
            "confidence level {level} outside (0, 1]"
        )));
    }
    let n = counts.len();
    let mut means: Vec<Rational64> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let total: u64 = (0..n)
                .map(|_| counts[rng.gen_range(0..n as u64) as usize])
                .sum();
            Rational64::new(total as i64, n as i64)
        })
        .collect();
    means.sort_unstable();

    let r = replicates as i64;
    let tail = (Rational64::one() - level) / 2;
    let lo = (tail * r).floor().to_integer().clamp(0, r - 1) as usize;
    let hi = (((Rational64::one() - tail) * r).ceil().to_integer() - 1).clamp(0, r - 1) as usize;
    Ok((means[lo], means[hi.max(lo)]))
}
