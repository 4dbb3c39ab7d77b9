use std::path::{Path, PathBuf};

use serde::Serialize;

use super::output::write_atomic;
use crate::error::{Error, Result};
use crate::esd::{LayerReports, SpectralReport};
use crate::matcore::mat1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeSummary {
    pub layers: usize,
    /// Layers whose power-law fit failed.
    pub failed: Vec<String>,
    pub mean_alpha: Option<f64>,
}

/// Layer name for a weight file: its stem, so `run/w1.mat1` is `w1`.
fn layer_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Loads every file and builds one report per file. Any unreadable or
/// malformed file fails the whole call, naming that file.
pub fn analyze_files(files: &[PathBuf]) -> Result<LayerReports> {
    if files.is_empty() {
        return Err(Error::Config("no weight files given".into()));
    }
    let mut reports = Vec::with_capacity(files.len());
    for path in files {
        let w = mat1::load(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let r = SpectralReport::new(layer_name(path), &w).map_err(|e| match e {
            Error::NonFinite(what) => Error::NonFinite(format!("{what} ({})", path.display())),
            e => e,
        })?;
        reports.push(r);
    }
    Ok(LayerReports::from_reports(reports))
}

pub fn summarize(reports: &LayerReports) -> AnalyzeSummary {
    AnalyzeSummary {
        layers: reports.reports.len(),
        failed: reports.reports.iter().filter(|r| r.alpha.alpha().is_none()).map(|r| r.layer_name.clone()).collect(),
        mean_alpha: reports.mean_alpha,
    }
}

/// Writes `spectral.jsonl` and `summary.json` into `dir`.
pub fn write_analysis(dir: &Path, reports: &LayerReports, truncate: bool) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut lines = Vec::new();
    reports.write_jsonl(&mut lines, truncate)?;
    write_atomic(&dir.join("spectral.jsonl"), &lines)?;
    let mut text = serde_json::to_string_pretty(&summarize(reports)).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write_atomic(&dir.join("summary.json"), text.as_bytes())
}
