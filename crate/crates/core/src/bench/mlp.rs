use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::{select_rows, Problem};
use crate::error::{Error, Result};
use crate::matcore::{random, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudentInit {
    Random,
    /// Start at the teacher's weights (zero loss).
    Teacher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpSpec {
    pub input: usize,
    pub hidden: usize,
    pub samples: usize,
    pub init: StudentInit,
    pub seed: u64,
}

impl Default for MlpSpec {
    fn default() -> Self {
        Self { input: 64, hidden: 64, samples: 2000, init: StudentInit::Random, seed: 0 }
    }
}

/// `ŷ = W₂ tanh(W₁ x)` fit by squared loss to a random teacher of the same
/// shape. Parameters are `W₁` (hidden × input) and `W₂` (1 × hidden).
#[derive(Debug, Clone)]
pub struct Mlp2 {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub teacher: [Matrix; 2],
    init: StudentInit,
}

fn layer_pair<R: rand::Rng>(input: usize, hidden: usize, rng: &mut R) -> [Matrix; 2] {
    [
        random::gaussian(hidden, input, rng).scale(1.0 / (input as f64).sqrt()),
        random::gaussian(1, hidden, rng).scale(1.0 / (hidden as f64).sqrt()),
    ]
}

struct Forward {
    xb: Matrix,
    h: Matrix,
    residual: Vec<f64>,
    loss: f64,
}

impl Mlp2 {
    pub fn new(spec: &MlpSpec) -> Result<Self> {
        if spec.input == 0 || spec.hidden == 0 || spec.samples == 0 {
            return Err(Error::InvalidDimensions { rows: spec.hidden, cols: spec.input, reason: "empty network" });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let teacher = layer_pair(spec.input, spec.hidden, &mut rng);
        let x = random::gaussian(spec.samples, spec.input, &mut rng);
        let mut me = Self { x, y: Vec::new(), teacher, init: spec.init };
        let y = me.outputs(&me.teacher, &me.full_batch()).1.into_data();
        me.y = y;
        Ok(me)
    }

    /// Hidden activations and outputs for the batch.
    fn outputs(&self, params: &[Matrix], batch: &[usize]) -> (Matrix, Matrix, Matrix) {
        let xb = select_rows(&self.x, batch);
        let h = xb.matmul_t(&params[0]).map(f64::tanh);
        let out = h.matmul_t(&params[1]);
        (xb, out, h)
    }

    fn forward(&self, params: &[Matrix], batch: &[usize]) -> Forward {
        let (xb, out, h) = self.outputs(params, batch);
        let residual: Vec<f64> = batch.iter().zip(out.data()).map(|(&i, o)| o - self.y[i]).collect();
        let loss = 0.5 * residual.iter().map(|r| r * r).sum::<f64>() / batch.len() as f64;
        Forward { xb, h, residual, loss }
    }
}

impl Problem for Mlp2 {
    fn name(&self) -> &str {
        "mlp2"
    }

    fn param_names(&self) -> Vec<String> {
        vec!["w1".into(), "w2".into()]
    }

    fn shapes(&self) -> Vec<(usize, usize)> {
        vec![self.teacher[0].shape(), self.teacher[1].shape()]
    }

    fn n_samples(&self) -> usize {
        self.x.rows()
    }

    fn init_params(&self, seed: u64) -> Vec<Matrix> {
        match self.init {
            StudentInit::Teacher => self.teacher.to_vec(),
            StudentInit::Random => {
                // offset keeps the student stream apart from the teacher's
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f57_0d3e_u64);
                layer_pair(self.x.cols(), self.teacher[0].rows(), &mut rng).to_vec()
            }
        }
    }

    fn loss(&self, params: &[Matrix], batch: &[usize]) -> f64 {
        self.forward(params, batch).loss
    }

    fn grad(&self, params: &[Matrix], batch: &[usize]) -> Vec<Matrix> {
        self.loss_and_grad(params, batch).1
    }

    fn loss_and_grad(&self, params: &[Matrix], batch: &[usize]) -> (f64, Vec<Matrix>) {
        let f = self.forward(params, batch);
        let b = batch.len();
        let r = Matrix::from_vec_unchecked(b, 1, f.residual.iter().map(|v| v / b as f64).collect());
        let g2 = r.t_matmul(&f.h);
        let dh = r.matmul(&params[1]);
        let dz = dh.zip_map(&f.h, |d, h| d * (1.0 - h * h));
        let g1 = dz.t_matmul(&f.xb);
        (f.loss, vec![g1, g2])
    }
}
