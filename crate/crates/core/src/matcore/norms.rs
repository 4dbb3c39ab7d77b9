use super::matrix::Matrix;
use super::svd::singular_values;
use crate::error::{Error, Result};

/// Schatten-`q` norm: the `ℓq` norm of the singular values.
/// `q = f64::INFINITY` gives the spectral norm.
pub fn schatten_norm(m: &Matrix, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(lq_norm(&singular_values(m)?, q))
}

pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    schatten_norm(m, 1.0)
}

pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    schatten_norm(m, f64::INFINITY)
}

pub(crate) fn check_exponent(q: f64) -> Result<()> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::Domain(format!("Schatten exponent must be >= 1, got {q}")));
    }
    Ok(())
}

/// `ℓq` norm of a non-negative sequence, scaled by its maximum to avoid
/// overflow for large `q`.
pub fn lq_norm(values: &[f64], q: f64) -> f64 {
    let max = values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    if max == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return max;
    }
    let s: f64 = values.iter().map(|&x| (x.abs() / max).powf(q)).sum();
    max * s.powf(1.0 / q)
}
