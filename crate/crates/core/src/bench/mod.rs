//! Desk-scale benchmark problems with hand-written gradients, a training
//! loop that records per-step diagnostics, finite-difference checks and a
//! FLOPs estimator for the orthogonalizing updates.

mod flops;
mod gradcheck;
mod logistic;
mod mlp;
mod problem;
mod regression;
mod train;

pub use flops::{flops_count, flops_estimate, FlopsKind};
pub use gradcheck::{finite_diff_check, FD_COORDINATES};
pub use logistic::{Logistic, LogisticSpec};
pub use mlp::{Mlp2, MlpSpec, StudentInit};
pub use problem::{Constant, Problem};
pub use regression::{MatrixRegression, RegressionSpec};
pub use train::{run_from, run_training, Checkpoint, RunRecord, StepRecord, TrainOptions};
