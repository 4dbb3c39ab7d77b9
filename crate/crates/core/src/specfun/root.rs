//! Fractional matrix power `X^(p/2)` of a PSD matrix by repeated coupled
//! Newton–Schulz square roots.

use super::newton_schulz::NsConfig;
use crate::error::{Error, Result};
use crate::matcore::{eig_sym, Matrix};

/// Eigenvalues below `-PSD_TOL · λ_max` make an input non-PSD.
pub const PSD_TOL: f64 = 1e-10;

/// Number of square-root rounds for power `p`: the smallest `L` with
/// `2^L >= 2/p`. Exact when `2/p` is a power of two; otherwise the result
/// is `X^(1/2^L)`, a slightly smaller power than `p/2`.
pub fn root_rounds(p: f64) -> Result<u32> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("root power must lie in (0, 1], got {p}")));
    }
    let target = 2.0 / p;
    let mut rounds = 0u32;
    // tolerance keeps exact powers of two from rounding up
    while f64::from(1u32 << rounds) < target * (1.0 - 1e-12) {
        rounds += 1;
    }
    Ok(rounds)
}

/// Approximates `x^(p/2)` for symmetric PSD `x`.
pub fn ns_root(x: &Matrix, p: f64, cfg: &NsConfig) -> Result<Matrix> {
    cfg.validate()?;
    let rounds = root_rounds(p)?;
    let eigs = eig_sym(x)?;
    let lmax = eigs.first().copied().unwrap_or(0.0).max(0.0);
    let lmin = eigs.last().copied().unwrap_or(0.0);
    if lmin < -PSD_TOL * lmax || (lmax == 0.0 && lmin < 0.0) {
        return Err(Error::NotPsd(lmin));
    }
    Ok(root_unchecked(x, rounds, cfg))
}

/// The iteration itself, without the PSD check.
pub(crate) fn root_unchecked(x: &Matrix, rounds: u32, cfg: &NsConfig) -> Matrix {
    let n = x.rows();
    let eye = Matrix::identity(n);
    let mut x = x.clone();
    for _ in 0..rounds {
        let alpha = x.frobenius_norm();
        x = x.scale(1.0 / (alpha + cfg.eps));
        let mut y = x.clone();
        let mut z = eye.clone();
        for _ in 0..cfg.ns_steps {
            let mut q = z.matmul(&y).scale(-1.0);
            for i in 0..n {
                q.set(i, i, q.get(i, i) + 3.0);
            }
            y = y.matmul(&q).scale(0.5);
            z = q.matmul(&z).scale(0.5);
        }
        x = y.scale(alpha.sqrt()).symmetrize();
        for i in 0..n {
            x.set(i, i, x.get(i, i) + cfg.eps);
        }
    }
    x
}
