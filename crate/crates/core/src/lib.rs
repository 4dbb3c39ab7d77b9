//! Spectral-power matrix optimizers (Muon, HTMuon and relatives), the
//! Newton–Schulz matrix functions behind them, and heavy-tailed spectral
//! diagnostics for weight matrices.

pub mod bench;
pub mod cli;
pub mod error;
pub mod esd;
pub mod matcore;
pub mod optim;
pub mod specfun;

pub use error::{Error, Result};
pub use matcore::Matrix;
