//! Seeded random matrix constructors.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::Matrix;
use super::svd::svd;

/// I.i.d. standard normal entries.
pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_vec_unchecked(rows, cols, data)
}

/// `rows x k` matrix with orthonormal columns (`k <= rows`), taken from the
/// left singular vectors of a Gaussian matrix.
pub fn orthonormal_cols<R: Rng + ?Sized>(rows: usize, k: usize, rng: &mut R) -> Matrix {
    assert!(k >= 1 && k <= rows);
    svd(&gaussian(rows, k, rng)).expect("svd of a gaussian matrix").u
}

/// `U · diag(sigma) · Vᵀ` with random orthonormal `U`, `V`.
pub fn with_spectrum<R: Rng + ?Sized>(rows: usize, cols: usize, sigma: &[f64], rng: &mut R) -> Matrix {
    let k = rows.min(cols);
    assert_eq!(sigma.len(), k, "need min(rows, cols) singular values");
    let u = orthonormal_cols(rows, k, rng);
    let v = orthonormal_cols(cols, k, rng);
    u.scale_cols(sigma).matmul_t(&v)
}

/// `k` values log-spaced from `1` down to `1 / cond`.
pub fn log_spaced_spectrum(k: usize, cond: f64) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    (0..k).map(|i| cond.powf(-(i as f64) / (k - 1) as f64)).collect()
}
