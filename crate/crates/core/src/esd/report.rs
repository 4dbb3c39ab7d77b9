use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, PowerLawFit};
use crate::error::{Error, Result};
use crate::matcore::{eig_sym, Matrix};

/// Length of the ESD kept when a report is truncated.
pub const ESD_TRUNCATE: usize = 512;

/// Eigenvalues of `WᵀW` from the smaller Gram side, descending, with
/// rounding negatives clamped to zero.
pub fn compute_esd(w: &Matrix) -> Result<Vec<f64>> {
    if !w.is_finite() {
        return Err(Error::NonFinite("weights".into()));
    }
    let gram = if w.rows() >= w.cols() { w.gram() } else { w.transpose().gram() };
    let mut eigs = eig_sym(&gram)?;
    eigs.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(eigs)
}

/// A fit, or the reason it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaResult {
    Fit(PowerLawFit),
    Failed { error: String },
}

impl AlphaResult {
    pub fn alpha(&self) -> Option<f64> {
        match self {
            AlphaResult::Fit(f) => Some(f.alpha),
            AlphaResult::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub layer_name: String,
    pub alpha: AlphaResult,
    pub spectral_norm: f64,
    pub frobenius_norm: f64,
    pub nuclear_norm: f64,
    pub esd: Vec<f64>,
}

impl SpectralReport {
    /// Report for one matrix; a failed fit is recorded, not returned.
    pub fn new(layer_name: impl Into<String>, w: &Matrix) -> Result<Self> {
        Ok(Self::from_esd(layer_name, compute_esd(w)?))
    }

    /// Report from an ESD already sorted descending.
    pub fn from_esd(layer_name: impl Into<String>, esd: Vec<f64>) -> Self {
        let alpha = match fit_power_law(&esd) {
            Ok(fit) => AlphaResult::Fit(fit),
            Err(e) => AlphaResult::Failed { error: e.to_string() },
        };
        let spectral_norm = esd.first().copied().unwrap_or(0.0).sqrt();
        let frobenius_norm = esd.iter().sum::<f64>().sqrt();
        let nuclear_norm = esd.iter().map(|v| v.sqrt()).sum();
        Self { layer_name: layer_name.into(), alpha, spectral_norm, frobenius_norm, nuclear_norm, esd }
    }

    /// Keeps only the `ESD_TRUNCATE` largest eigenvalues.
    pub fn truncate_esd(&mut self) {
        self.esd.truncate(ESD_TRUNCATE);
    }
}

/// Per-layer reports and their mean exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReports {
    pub reports: Vec<SpectralReport>,
    /// Mean `α` over layers whose fit succeeded.
    pub mean_alpha: Option<f64>,
}

impl LayerReports {
    pub fn from_reports(reports: Vec<SpectralReport>) -> Self {
        let alphas: Vec<f64> = reports.iter().filter_map(|r| r.alpha.alpha()).collect();
        let mean_alpha = (!alphas.is_empty()).then(|| alphas.iter().sum::<f64>() / alphas.len() as f64);
        Self { reports, mean_alpha }
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W, truncate: bool) -> Result<()> {
        for r in &self.reports {
            let line = if truncate {
                let mut r = r.clone();
                r.truncate_esd();
                serde_json::to_string(&r)
            } else {
                serde_json::to_string(r)
            }
            .map_err(|e| Error::Format(e.to_string()))?;
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

pub fn spectral_report<S: AsRef<str>>(layers: &[(S, Matrix)]) -> Result<LayerReports> {
    let reports = layers
        .iter()
        .map(|(name, w)| SpectralReport::new(name.as_ref(), w))
        .collect::<Result<Vec<_>>>()?;
    Ok(LayerReports::from_reports(reports))
}
