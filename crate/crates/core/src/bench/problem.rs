use crate::matcore::Matrix;

/// A differentiable objective over one or more weight matrices. Losses and
/// gradients are averages over the sample indices in `batch`, scaled so the
/// full-batch value is the problem's objective.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    /// Names of the parameter matrices, in order.
    fn param_names(&self) -> Vec<String>;

    fn shapes(&self) -> Vec<(usize, usize)>;

    /// Number of samples a batch indexes into.
    fn n_samples(&self) -> usize;

    /// Starting parameters, deterministic in `seed`.
    fn init_params(&self, seed: u64) -> Vec<Matrix>;

    fn loss(&self, params: &[Matrix], batch: &[usize]) -> f64;

    fn grad(&self, params: &[Matrix], batch: &[usize]) -> Vec<Matrix>;

    fn loss_and_grad(&self, params: &[Matrix], batch: &[usize]) -> (f64, Vec<Matrix>) {
        (self.loss(params, batch), self.grad(params, batch))
    }

    /// Smoothness constant of the full objective, when known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn full_batch(&self) -> Vec<usize> {
        (0..self.n_samples()).collect()
    }
}

/// A loss that ignores its parameters. Useful for plumbing tests.
#[derive(Debug, Clone)]
pub struct Constant {
    pub value: f64,
    pub shape: (usize, usize),
}

impl Problem for Constant {
    fn name(&self) -> &str {
        "constant"
    }

    fn param_names(&self) -> Vec<String> {
        vec!["w".into()]
    }

    fn shapes(&self) -> Vec<(usize, usize)> {
        vec![self.shape]
    }

    fn n_samples(&self) -> usize {
        1
    }

    fn init_params(&self, _seed: u64) -> Vec<Matrix> {
        vec![Matrix::zeros(self.shape.0, self.shape.1)]
    }

    fn loss(&self, _params: &[Matrix], _batch: &[usize]) -> f64 {
        self.value
    }

    fn grad(&self, _params: &[Matrix], _batch: &[usize]) -> Vec<Matrix> {
        vec![Matrix::zeros(self.shape.0, self.shape.1)]
    }
}

/// Gathers the given rows of `m` into a new matrix.
pub(crate) fn select_rows(m: &Matrix, rows: &[usize]) -> Matrix {
    let cols = m.cols();
    let mut data = Vec::with_capacity(rows.len() * cols);
    for &r in rows {
        data.extend_from_slice(m.row(r));
    }
    Matrix::from_vec_unchecked(rows.len(), cols, data)
}
