use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::problem::{select_rows, Problem};
use crate::error::{Error, Result};
use crate::matcore::{random, spectral_norm, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegressionSpec {
    pub rows: usize,
    pub cols: usize,
    /// Rows of `A` (the samples) and columns of `B`.
    pub inner: usize,
    /// Noise standard deviation relative to the RMS of `A W* B`.
    pub noise: f64,
    pub seed: u64,
}

impl Default for RegressionSpec {
    fn default() -> Self {
        Self { rows: 64, cols: 64, inner: 32, noise: 1e-3, seed: 0 }
    }
}

/// `f(W) = ‖A W B − C‖²_F / 2` with `C = A W* B + noise`. Each row of `A`
/// is one sample.
#[derive(Debug, Clone)]
pub struct MatrixRegression {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub w_star: Matrix,
    lipschitz: f64,
}

impl MatrixRegression {
    pub fn new(spec: &RegressionSpec) -> Result<Self> {
        if spec.rows == 0 || spec.cols == 0 || spec.inner == 0 {
            return Err(Error::InvalidDimensions { rows: spec.rows, cols: spec.cols, reason: "empty regression" });
        }
        if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
            return Err(Error::Config(format!("noise must be >= 0, got {}", spec.noise)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let a = random::gaussian(spec.inner, spec.rows, &mut rng).scale(1.0 / (spec.rows as f64).sqrt());
        let b = random::gaussian(spec.cols, spec.inner, &mut rng).scale(1.0 / (spec.cols as f64).sqrt());
        let w_star = random::gaussian(spec.rows, spec.cols, &mut rng).scale(1.0 / (spec.cols as f64).sqrt());
        let signal = a.matmul(&w_star).matmul(&b);
        let rms = signal.frobenius_norm() / ((signal.rows() * signal.cols()) as f64).sqrt();
        let std = spec.noise * rms;
        let mut c = signal;
        for v in c.data_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += std * z;
        }
        let lipschitz = spectral_norm(&a)?.powi(2) * spectral_norm(&b)?.powi(2);
        Ok(Self { a, b, c, w_star, lipschitz })
    }

    fn residual(&self, w: &Matrix, batch: &[usize]) -> (Matrix, Matrix) {
        let a = select_rows(&self.a, batch);
        let r = a.matmul(w).matmul(&self.b).sub(&select_rows(&self.c, batch));
        (a, r)
    }

    fn weight(&self, batch: &[usize]) -> f64 {
        self.a.rows() as f64 / batch.len() as f64
    }
}

impl Problem for MatrixRegression {
    fn name(&self) -> &str {
        "matrix_regression"
    }

    fn param_names(&self) -> Vec<String> {
        vec!["w".into()]
    }

    fn shapes(&self) -> Vec<(usize, usize)> {
        vec![self.w_star.shape()]
    }

    fn n_samples(&self) -> usize {
        self.a.rows()
    }

    fn init_params(&self, _seed: u64) -> Vec<Matrix> {
        let (r, c) = self.w_star.shape();
        vec![Matrix::zeros(r, c)]
    }

    fn loss(&self, params: &[Matrix], batch: &[usize]) -> f64 {
        let (_, r) = self.residual(&params[0], batch);
        0.5 * self.weight(batch) * r.inner(&r)
    }

    fn grad(&self, params: &[Matrix], batch: &[usize]) -> Vec<Matrix> {
        self.loss_and_grad(params, batch).1
    }

    fn loss_and_grad(&self, params: &[Matrix], batch: &[usize]) -> (f64, Vec<Matrix>) {
        let (a, r) = self.residual(&params[0], batch);
        let s = self.weight(batch);
        let g = a.t_matmul(&r.matmul_t(&self.b)).scale(s);
        (0.5 * s * r.inner(&r), vec![g])
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_minimizer_has_zero_loss() {
        let p = MatrixRegression::new(&RegressionSpec { noise: 0.0, ..Default::default() }).unwrap();
        let loss = p.loss(std::slice::from_ref(&p.w_star), &p.full_batch());
        assert!(loss < 1e-24, "{loss}");
        assert!(p.loss(&p.init_params(0), &p.full_batch()) > 0.0);
    }

    #[test]
    fn full_batch_is_the_objective() {
        let p = MatrixRegression::new(&RegressionSpec { rows: 5, cols: 4, inner: 3, ..Default::default() }).unwrap();
        let w = Matrix::from_fn(5, 4, |i, j| (i as f64 - j as f64) * 0.1);
        let r = p.a.matmul(&w).matmul(&p.b).sub(&p.c);
        assert!((p.loss(&[w], &[0, 1, 2]) - 0.5 * r.inner(&r)).abs() < 1e-12);
    }
}
