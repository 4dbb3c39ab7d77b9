use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::{select_rows, Problem};
use crate::error::{Error, Result};
use crate::matcore::{random, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogisticSpec {
    pub dim: usize,
    pub classes: usize,
    pub samples: usize,
    /// Norm of each class mean; points get unit-variance noise.
    pub separation: f64,
    pub seed: u64,
}

impl Default for LogisticSpec {
    fn default() -> Self {
        Self { dim: 100, classes: 10, samples: 5000, separation: 3.0, seed: 0 }
    }
}

/// Multinomial cross-entropy on Gaussian clusters, weights `d × K`.
#[derive(Debug, Clone)]
pub struct Logistic {
    pub x: Matrix,
    pub labels: Vec<usize>,
    pub means: Matrix,
}

impl Logistic {
    pub fn new(spec: &LogisticSpec) -> Result<Self> {
        if spec.dim == 0 || spec.samples == 0 {
            return Err(Error::InvalidDimensions { rows: spec.samples, cols: spec.dim, reason: "empty dataset" });
        }
        if spec.classes < 2 {
            return Err(Error::Config(format!("need at least 2 classes, got {}", spec.classes)));
        }
        if !(spec.separation >= 0.0 && spec.separation.is_finite()) {
            return Err(Error::Config(format!("separation must be >= 0, got {}", spec.separation)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut means = random::gaussian(spec.classes, spec.dim, &mut rng);
        for k in 0..spec.classes {
            let row = means.row_mut(k);
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            row.iter_mut().for_each(|v| *v *= spec.separation / norm);
        }
        let labels: Vec<usize> = (0..spec.samples).map(|_| rng.gen_range(0..spec.classes)).collect();
        let noise = random::gaussian(spec.samples, spec.dim, &mut rng);
        let x = Matrix::from_fn(spec.samples, spec.dim, |i, j| means.get(labels[i], j) + noise.get(i, j));
        Ok(Self { x, labels, means })
    }

    /// Row-wise softmax probabilities and the mean cross-entropy.
    fn forward(&self, w: &Matrix, batch: &[usize]) -> (Matrix, Matrix, f64) {
        let xb = select_rows(&self.x, batch);
        let mut probs = xb.matmul(w);
        let mut loss = 0.0;
        for (r, &i) in batch.iter().enumerate() {
            let row = probs.row_mut(r);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                z += *v;
            }
            loss += z.ln() - row[self.labels[i]].ln();
            row.iter_mut().for_each(|v| *v /= z);
        }
        (xb, probs, loss / batch.len() as f64)
    }
}

impl Problem for Logistic {
    fn name(&self) -> &str {
        "logistic"
    }

    fn param_names(&self) -> Vec<String> {
        vec!["w".into()]
    }

    fn shapes(&self) -> Vec<(usize, usize)> {
        vec![(self.x.cols(), self.means.rows())]
    }

    fn n_samples(&self) -> usize {
        self.x.rows()
    }

    fn init_params(&self, _seed: u64) -> Vec<Matrix> {
        vec![Matrix::zeros(self.x.cols(), self.means.rows())]
    }

    fn loss(&self, params: &[Matrix], batch: &[usize]) -> f64 {
        self.forward(&params[0], batch).2
    }

    fn grad(&self, params: &[Matrix], batch: &[usize]) -> Vec<Matrix> {
        self.loss_and_grad(params, batch).1
    }

    fn loss_and_grad(&self, params: &[Matrix], batch: &[usize]) -> (f64, Vec<Matrix>) {
        let (xb, mut probs, loss) = self.forward(&params[0], batch);
        for (r, &i) in batch.iter().enumerate() {
            probs.row_mut(r)[self.labels[i]] -= 1.0;
        }
        let g = xb.t_matmul(&probs).scale(1.0 / batch.len() as f64);
        (loss, vec![g])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_log_k() {
        let p = Logistic::new(&LogisticSpec { dim: 5, classes: 4, samples: 30, ..Default::default() }).unwrap();
        let loss = p.loss(&p.init_params(0), &p.full_batch());
        assert!((loss - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_one_class() {
        assert!(Logistic::new(&LogisticSpec { classes: 1, ..Default::default() }).is_err());
    }
}
