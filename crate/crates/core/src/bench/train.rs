use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::Problem;
use crate::error::{Error, Result};
use crate::esd::{LayerReports, SpectralReport};
use crate::matcore::{nuclear_norm, Matrix};
use crate::optim::{scheduled_step, OptimizerConfig, OptimizerKind, OptimizerState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainOptions {
    pub steps: usize,
    /// Samples per step; at least the dataset size means full batch.
    pub batch_size: usize,
    pub seed: u64,
    /// Step indices after which weight and update spectra are recorded.
    pub checkpoints: Vec<usize>,
    /// Record `‖∇f‖_*` each step (one SVD per parameter per step).
    pub nuclear_diagnostics: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { steps: 100, batch_size: usize::MAX, seed: 0, checkpoints: Vec::new(), nuclear_diagnostics: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Minibatch loss at the weights the gradient was taken at.
    pub loss: f64,
    pub grad_frobenius: f64,
    pub grad_nuclear: Option<f64>,
    /// Per-parameter effective learning rate.
    pub effective_lr: Vec<f64>,
    pub heavy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub step: usize,
    pub weights: LayerReports,
    pub directions: LayerReports,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub optimizer: OptimizerKind,
    pub steps: Vec<StepRecord>,
    pub checkpoints: Vec<Checkpoint>,
    pub final_params: Vec<Matrix>,
    /// Full-dataset loss at the final weights.
    pub final_loss: f64,
}

impl RunRecord {
    pub fn losses(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.loss).collect()
    }

    pub fn heavy_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.heavy).count()
    }

    /// Running minimum of the gradient nuclear norm, where recorded.
    pub fn min_grad_nuclear(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.steps
            .iter()
            .filter_map(|s| s.grad_nuclear)
            .map(|v| {
                best = best.min(v);
                best
            })
            .collect()
    }

    /// Spectral reports of the final weights.
    pub fn final_report(&self, names: &[String]) -> Result<LayerReports> {
        reports(names, &self.final_params)
    }
}

fn reports(names: &[String], mats: &[Matrix]) -> Result<LayerReports> {
    let reports = names.iter().zip(mats).map(|(n, m)| SpectralReport::new(n.as_str(), m)).collect::<Result<_>>()?;
    Ok(LayerReports::from_reports(reports))
}

/// Trains `problem` from its seeded initialization with one optimizer state
/// per parameter, following `cfg.interval`.
pub fn run_training(problem: &dyn Problem, cfg: &OptimizerConfig, opts: &TrainOptions) -> Result<RunRecord> {
    run_from(problem, cfg, opts, problem.init_params(opts.seed))
}

/// Like [`run_training`] from explicit starting parameters.
pub fn run_from(
    problem: &dyn Problem,
    cfg: &OptimizerConfig,
    opts: &TrainOptions,
    mut params: Vec<Matrix>,
) -> Result<RunRecord> {
    cfg.validate()?;
    if opts.steps == 0 {
        return Err(Error::Config("steps must be >= 1".into()));
    }
    if opts.batch_size == 0 {
        return Err(Error::Config("batch_size must be >= 1".into()));
    }
    if let Some(&c) = opts.checkpoints.iter().find(|&&c| c >= opts.steps) {
        return Err(Error::Config(format!("checkpoint {c} is past the last step {}", opts.steps - 1)));
    }
    let shapes = problem.shapes();
    let got: Vec<_> = params.iter().map(Matrix::shape).collect();
    if got != shapes {
        return Err(Error::Config(format!("parameter shapes {got:?} do not match {shapes:?}")));
    }
    let names = problem.param_names();
    let n = problem.n_samples();
    let full = problem.full_batch();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(1);
    let mut states: Vec<OptimizerState> =
        shapes.iter().map(|&(r, c)| OptimizerState::for_config(cfg, r, c)).collect();
    let mut records = Vec::with_capacity(opts.steps);
    let mut checkpoints = Vec::new();

    for t in 0..opts.steps {
        let batch = if opts.batch_size >= n {
            full.clone()
        } else {
            let mut b = sample(&mut rng, n, opts.batch_size).into_vec();
            b.sort_unstable();
            b
        };
        let (loss, grads) = problem.loss_and_grad(&params, &batch);
        if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::NanLoss(t));
        }
        let grad_frobenius = grads.iter().map(|g| g.inner(g)).sum::<f64>().sqrt();
        let grad_nuclear = if opts.nuclear_diagnostics {
            Some(grads.iter().map(nuclear_norm).sum::<Result<f64>>()?)
        } else {
            None
        };
        let mut effective_lr = Vec::with_capacity(params.len());
        let mut directions = Vec::with_capacity(params.len());
        let mut heavy = false;
        for ((w, g), st) in params.iter_mut().zip(&grads).zip(&mut states) {
            let (next, trace) = scheduled_step(cfg, st, w, g).map_err(|e| match e {
                Error::NonFinite(_) => Error::NanLoss(t),
                e => e,
            })?;
            *w = next;
            effective_lr.push(trace.effective_lr);
            heavy |= trace.heavy;
            directions.push(trace.direction);
        }
        if opts.checkpoints.contains(&t) {
            checkpoints.push(Checkpoint {
                step: t,
                weights: reports(&names, &params)?,
                directions: reports(&names, &directions)?,
            });
        }
        records.push(StepRecord { step: t, loss, grad_frobenius, grad_nuclear, effective_lr, heavy });
    }
    let final_loss = problem.loss(&params, &full);
    if !final_loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
        return Err(Error::NanLoss(opts.steps));
    }
    Ok(RunRecord {
        problem: problem.name().to_string(),
        optimizer: cfg.kind,
        steps: records,
        checkpoints,
        final_params: params,
        final_loss,
    })
}
