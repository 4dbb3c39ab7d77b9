use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest positive eigenvalues a fit accepts.
pub const MIN_EIGENVALUES: usize = 50;
/// Fewest points allowed above `xmin`.
pub const MIN_TAIL: usize = 10;
/// Relative spread below which values count as equal, so spectra that are
/// flat up to rounding (orthogonal matrices) are reported as degenerate.
pub const FLAT_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: f64,
    pub ks_stat: f64,
    pub n_tail: usize,
}

/// `1 + 1/(2s)`: the ESD exponent of a matrix whose singular values decay
/// like `k^{-s}`.
pub fn decay_alpha(s: f64) -> Result<f64> {
    if s.is_nan() || s <= 0.0 || s.is_infinite() {
        return Err(Error::Domain(format!("decay exponent must be positive, got {s}")));
    }
    Ok(1.0 + 1.0 / (2.0 * s))
}

/// Continuous power-law fit by the Hill estimator, with `xmin` chosen among
/// the observed values to minimize the Kolmogorov–Smirnov distance. Zero
/// and negative values are dropped first.
pub fn fit_power_law(eigs: &[f64]) -> Result<PowerLawFit> {
    if eigs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eigenvalues".into()));
    }
    let mut x: Vec<f64> = eigs.iter().copied().filter(|&v| v > 0.0).collect();
    if x.len() < MIN_EIGENVALUES {
        return Err(Error::TooFewEigenvalues { needed: MIN_EIGENVALUES, got: x.len() });
    }
    x.sort_by(f64::total_cmp);
    let n = x.len();
    if x[n - 1] - x[0] <= FLAT_RTOL * x[n - 1] {
        return Err(Error::DegenerateSpectrum);
    }
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    // suffix[j] = Σ_{i ≥ j} ln x_i
    let mut suffix = vec![0.0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + logs[j];
    }

    let mut best: Option<PowerLawFit> = None;
    let mut j = 0;
    while j + MIN_TAIL <= n {
        let n_tail = n - j;
        let denom = suffix[j] - n_tail as f64 * logs[j];
        if logs[n - 1] - logs[j] > FLAT_RTOL {
            let alpha = 1.0 + n_tail as f64 / denom;
            let bound = best.map_or(f64::INFINITY, |b| b.ks_stat);
            if let Some(d) = ks_distance(&logs[j..], alpha, bound) {
                best = Some(PowerLawFit { alpha, xmin: x[j], ks_stat: d, n_tail });
            }
        }
        // next distinct value
        let v = x[j];
        while j < n && x[j] == v {
            j += 1;
        }
    }
    best.ok_or(Error::DegenerateSpectrum)
}

/// KS distance between the sorted tail (given by its logs) and the power
/// law with exponent `alpha` starting at the first tail value. Returns
/// `None` once the distance reaches `bound`, so only strict improvements
/// are reported.
fn ks_distance(log_tail: &[f64], alpha: f64, bound: f64) -> Option<f64> {
    let n = log_tail.len();
    let nf = n as f64;
    let log_min = log_tail[0];
    let gap = |i: usize| {
        let cdf = 1.0 - ((1.0 - alpha) * (log_tail[i] - log_min)).exp();
        (cdf - i as f64 / nf).abs().max(((i + 1) as f64 / nf - cdf).abs())
    };
    // a few spread-out probes reject most candidates before the full pass
    if bound.is_finite() {
        let probes = PROBES.min(n);
        for k in 1..probes {
            if gap(k * (n - 1) / probes) >= bound {
                return None;
            }
        }
    }
    let mut d: f64 = 0.0;
    for i in 0..n {
        d = d.max(gap(i));
        if d >= bound {
            return None;
        }
    }
    Some(d)
}

const PROBES: usize = 2048;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_alpha_values() {
        assert_eq!(decay_alpha(0.5).unwrap(), 2.0);
        assert_eq!(decay_alpha(0.25).unwrap(), 3.0);
        assert!((decay_alpha(100.0).unwrap() - 1.005).abs() < 1e-12);
        assert!(decay_alpha(0.0).is_err());
        assert!(decay_alpha(-1.0).is_err());
    }

    #[test]
    fn synthetic_decay() {
        let eigs: Vec<f64> = (1..=2000).map(|k| (k as f64).powf(-1.0)).collect();
        let fit = fit_power_law(&eigs).unwrap();
        assert!((fit.alpha - 2.0).abs() < 0.2, "{fit:?}");
        assert!(fit.n_tail >= MIN_TAIL);
        assert!((0.0..=1.0).contains(&fit.ks_stat));
    }

    #[test]
    fn rejects_small_and_flat_spectra() {
        assert!(matches!(fit_power_law(&[1.0; 20]), Err(Error::TooFewEigenvalues { .. })));
        assert_eq!(fit_power_law(&[2.0; 80]), Err(Error::DegenerateSpectrum));
        let nearly: Vec<f64> = (0..80).map(|i| 1.0 + 1e-12 * f64::from(i)).collect();
        assert_eq!(fit_power_law(&nearly), Err(Error::DegenerateSpectrum));
        let mut with_zeros = vec![0.0; 100];
        with_zeros.extend((1..=40).map(f64::from));
        assert!(matches!(fit_power_law(&with_zeros), Err(Error::TooFewEigenvalues { got: 40, .. })));
    }

    #[test]
    fn uniform_spectrum_is_not_heavy_tailed() {
        let eigs: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 / 199.0).collect();
        if let Ok(fit) = fit_power_law(&eigs) {
            assert!(fit.alpha > 10.0, "{fit:?}");
        }
    }
}
