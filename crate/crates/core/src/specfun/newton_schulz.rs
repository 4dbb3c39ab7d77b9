use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::Matrix;

/// Number of quintic iterations in the orthogonalizer.
pub const QUINTIC_STEPS: usize = 5;

/// Settings shared by the quintic orthogonalizer and the coupled
/// square-root iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NsConfig {
    /// Inner iterations per square-root round.
    pub ns_steps: usize,
    /// Normalization guard and per-round diagonal shift.
    pub eps: f64,
    /// Quintic coefficients `(a, b, c)` for `X ← aX + (bA + cA²)X`, `A = XXᵀ`.
    pub coefficients: (f64, f64, f64),
}

impl Default for NsConfig {
    fn default() -> Self {
        Self { ns_steps: 15, eps: 1e-7, coefficients: (3.4445, -4.7750, 2.0315) }
    }
}

impl NsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns_steps == 0 {
            return Err(Error::Config("ns_steps must be >= 1".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config("ns eps must be positive".into()));
        }
        let (a, b, c) = self.coefficients;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Config("ns coefficients must be finite".into()));
        }
        Ok(())
    }
}

/// Five-step quintic Newton–Schulz approximation of the polar factor.
///
/// The input is scaled to unit Frobenius norm and iterated in its wide
/// orientation so `XXᵀ` is the smaller Gram matrix.
pub fn newton_schulz5(m: &Matrix, cfg: &NsConfig) -> Result<Matrix> {
    cfg.validate()?;
    if !m.is_finite() {
        return Err(Error::NonFinite("newton_schulz5 input".into()));
    }
    if m.is_zero() {
        return Err(Error::ZeroMomentum);
    }
    Ok(quintic(m, cfg))
}

pub(crate) fn quintic(m: &Matrix, cfg: &NsConfig) -> Matrix {
    let (a, b, c) = cfg.coefficients;
    let transposed = m.rows() > m.cols();
    let mut x = if transposed { m.transpose() } else { m.clone() };
    let norm = x.frobenius_norm();
    x = x.scale(1.0 / (norm + cfg.eps));
    for _ in 0..QUINTIC_STEPS {
        let gram = x.matmul_t(&x);
        let mut poly = gram.matmul(&gram).scale(c);
        poly.add_scaled(b, &gram);
        let mut next = poly.matmul(&x);
        next.add_scaled(a, &x);
        x = next;
    }
    if transposed {
        x.transpose()
    } else {
        x
    }
}
