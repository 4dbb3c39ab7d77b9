use crate::error::{Error, Result};
use crate::matcore::Matrix;

use super::config::{OptimizerConfig, OptimizerKind};

/// Second-moment buffer: elementwise for the Adam family, one entry per
/// output row for NorMuon.
#[derive(Debug, Clone, PartialEq)]
pub enum SecondMoment {
    Elementwise(Matrix),
    Rows(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    /// Completed steps.
    pub t: u64,
    pub momentum: Matrix,
    pub second_moment: Option<SecondMoment>,
}

impl OptimizerState {
    /// Zero state for a `rows × cols` parameter.
    pub fn new(kind: OptimizerKind, rows: usize, cols: usize) -> Self {
        let second_moment = match kind {
            OptimizerKind::Adam | OptimizerKind::AdamW => {
                Some(SecondMoment::Elementwise(Matrix::zeros(rows, cols)))
            }
            k if k.is_normuon_family() => Some(SecondMoment::Rows(vec![0.0; rows])),
            _ => None,
        };
        Self { t: 0, momentum: Matrix::zeros(rows, cols), second_moment }
    }

    pub fn for_config(cfg: &OptimizerConfig, rows: usize, cols: usize) -> Self {
        Self::new(cfg.kind, rows, cols)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.momentum.shape()
    }

    /// Checks that the buffers fit `kind` and a parameter of `shape`.
    pub(crate) fn check(&self, kind: OptimizerKind, shape: (usize, usize)) -> Result<()> {
        if self.momentum.shape() != shape {
            return Err(Error::ShapeMismatch { expected: shape, got: self.momentum.shape() });
        }
        let ok = match (&self.second_moment, kind) {
            (Some(SecondMoment::Elementwise(v)), OptimizerKind::Adam | OptimizerKind::AdamW) => {
                if v.shape() != shape {
                    return Err(Error::ShapeMismatch { expected: shape, got: v.shape() });
                }
                true
            }
            (Some(SecondMoment::Rows(v)), k) if k.is_normuon_family() => {
                if v.len() != shape.0 {
                    return Err(Error::ShapeMismatch { expected: (shape.0, 1), got: (v.len(), 1) });
                }
                true
            }
            (None, k) => !matches!(k, OptimizerKind::Adam | OptimizerKind::AdamW) && !k.is_normuon_family(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("optimizer state does not match kind {kind}")))
        }
    }
}
