use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{mat1, Matrix};

use super::config::{OptimizerConfig, OptimizerKind};
use super::state::{OptimizerState, SecondMoment};

/// Checkpoint of one parameter's optimizer. Matrices are MAT1 bytes in
/// base64; a per-row second moment is stored as an `m × 1` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSnapshot {
    pub kind: OptimizerKind,
    pub t: u64,
    pub hyperparameters: OptimizerConfig,
    pub momentum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_moment: Option<String>,
}

fn encode(m: &Matrix) -> String {
    STANDARD.encode(mat1::encode(m))
}

fn decode(s: &str) -> Result<Matrix> {
    let bytes = STANDARD.decode(s).map_err(|e| Error::Format(format!("base64: {e}")))?;
    mat1::decode(&bytes)
}

impl StateSnapshot {
    pub fn capture(cfg: &OptimizerConfig, state: &OptimizerState) -> Self {
        let second_moment = state.second_moment.as_ref().map(|v| match v {
            SecondMoment::Elementwise(m) => encode(m),
            SecondMoment::Rows(r) => encode(&Matrix::from_vec_unchecked(r.len(), 1, r.clone())),
        });
        Self {
            kind: cfg.kind,
            t: state.t,
            hyperparameters: cfg.clone(),
            momentum: encode(&state.momentum),
            second_moment,
        }
    }

    pub fn restore(&self) -> Result<(OptimizerConfig, OptimizerState)> {
        if self.kind != self.hyperparameters.kind {
            return Err(Error::Format("snapshot kind disagrees with hyperparameters".into()));
        }
        self.hyperparameters.validate()?;
        let momentum = decode(&self.momentum)?;
        let second_moment = match &self.second_moment {
            None => None,
            Some(s) => {
                let m = decode(s)?;
                Some(if self.kind.is_normuon_family() {
                    if m.cols() != 1 {
                        return Err(Error::Format("row second moment must be a column".into()));
                    }
                    SecondMoment::Rows(m.into_data())
                } else {
                    SecondMoment::Elementwise(m)
                })
            }
        };
        let state = OptimizerState { t: self.t, momentum, second_moment };
        state.check(self.kind, state.momentum.shape()).map_err(|e| Error::Format(e.to_string()))?;
        Ok((self.hyperparameters.clone(), state))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::step;

    #[test]
    fn resume_is_bit_identical() {
        for kind in [OptimizerKind::Adam, OptimizerKind::NorMuon, OptimizerKind::HtMuon] {
            let cfg = OptimizerConfig::new(kind);
            let mut st = OptimizerState::for_config(&cfg, 3, 2);
            let w = Matrix::from_fn(3, 2, |i, j| (i as f64) - 0.5 * j as f64);
            let g = Matrix::from_fn(3, 2, |i, j| 0.3 * i as f64 + j as f64 - 0.7);
            let (w1, _) = step(&cfg, &mut st, &w, &g).unwrap();
            let json = StateSnapshot::capture(&cfg, &st).to_json().unwrap();
            let (cfg2, mut st2) = StateSnapshot::from_json(&json).unwrap().restore().unwrap();
            assert_eq!(st2, st);
            let (a, _) = step(&cfg, &mut st, &w1, &g).unwrap();
            let (b, _) = step(&cfg2, &mut st2, &w1, &g).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_garbage() {
        let cfg = OptimizerConfig::new(OptimizerKind::MuonNs);
        let mut snap = StateSnapshot::capture(&cfg, &OptimizerState::for_config(&cfg, 2, 2));
        snap.momentum = "!!!".into();
        assert!(matches!(snap.restore(), Err(Error::Format(_))));
    }
}
