use crate::error::{Error, Result};
use crate::matcore::{svd, Matrix, SvdResult};

/// `σ^p` with `0^p = 0` for every `p`, including `p = 0`.
#[inline]
pub fn spectral_power(sigma: f64, p: f64) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        sigma.powf(p)
    }
}

/// `U · diag(σᵢ^p) · Vᵀ` through the exact SVD.
pub fn power_transform(m: &Matrix, p: f64) -> Result<Matrix> {
    check_power(p)?;
    Ok(power_from_svd(&svd(m)?, p))
}

pub(crate) fn check_power(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("power must lie in [0, 1], got {p}")));
    }
    Ok(())
}

pub(crate) fn power_from_svd(f: &SvdResult, p: f64) -> Matrix {
    f.recompose_with(|_, s| spectral_power(s, p))
}

/// Polar factor `U Vᵀ` on the row/column space of `m` (zero singular values
/// contribute nothing).
pub fn polar(m: &Matrix) -> Result<Matrix> {
    power_transform(m, 0.0)
}
