use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::problem::Problem;
use crate::matcore::Matrix;

/// Coordinates probed by [`finite_diff_check`] (all of them when fewer).
pub const FD_COORDINATES: usize = 100;
const FD_SEED: u64 = 0x0fd;

/// Largest `|analytic − numeric| / (|numeric| + 1e-12)` over randomly chosen
/// coordinates, with central differences of step `h`.
pub fn finite_diff_check(problem: &dyn Problem, params: &[Matrix], batch: &[usize], h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let grads = problem.grad(params, batch);
    let sizes: Vec<usize> = params.iter().map(|p| p.rows() * p.cols()).collect();
    let total: usize = sizes.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(FD_SEED);
    let picks = sample(&mut rng, total, FD_COORDINATES.min(total)).into_vec();
    let mut work = params.to_vec();
    let mut worst: f64 = 0.0;
    for flat in picks {
        let (mut k, mut idx) = (0, flat);
        while idx >= sizes[k] {
            idx -= sizes[k];
            k += 1;
        }
        let orig = work[k].data()[idx];
        work[k].data_mut()[idx] = orig + h;
        let up = problem.loss(&work, batch);
        work[k].data_mut()[idx] = orig - h;
        let down = problem.loss(&work, batch);
        work[k].data_mut()[idx] = orig;
        let numeric = (up - down) / (2.0 * h);
        let analytic = grads[k].data()[idx];
        worst = worst.max((analytic - numeric).abs() / (numeric.abs() + 1e-12));
    }
    worst
}
