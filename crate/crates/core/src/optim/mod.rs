//! Optimizer steppers: SGDM, Adam, AdamW, Muon (SVD and Newton–Schulz),
//! HTMuon and its NS / heavy-tailed / NorMuon variants, interval scheduling
//! and the smoothness-based adaptive learning rate.

mod adaptive;
mod config;
mod snapshot;
mod state;
mod step;

pub use adaptive::{adaptive_lr, momentum_error_bound, MomentumBound};
pub use config::{AdaptiveLr, OptimizerConfig, OptimizerKind};
pub use snapshot::StateSnapshot;
pub use state::{OptimizerState, SecondMoment};
pub use step::{scheduled_step, shape_scale, step, UpdateTrace};
