use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::matcore::random;
use crate::specfun::{verify_steepest, SteepestCheck};

pub const DEFAULT_DELTA: f64 = 1.0;
pub const DEFAULT_DIM: u32 = 8;
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Checks the closed-form steepest step against random feasible points for
/// a Gaussian `G̃` drawn from `seed`.
pub fn run_oracle(q: f64, delta: f64, rows: usize, cols: usize, n_samples: usize, seed: u64) -> Result<SteepestCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random::gaussian(rows, cols, &mut rng);
    verify_steepest(&g, q, delta, n_samples, seed.wrapping_add(1))
}
