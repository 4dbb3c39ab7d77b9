//! Heavy-tail diagnostics: the empirical spectral density of `WᵀW`,
//! power-law exponent fits and per-layer norm reports.

mod fit;
mod report;

pub use fit::{fit_power_law, decay_alpha, PowerLawFit, FLAT_RTOL, MIN_EIGENVALUES, MIN_TAIL};
pub use report::{compute_esd, spectral_report, AlphaResult, LayerReports, SpectralReport, ESD_TRUNCATE};
