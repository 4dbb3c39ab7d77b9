//! Thin SVD by one-sided (Hestenes) Jacobi.
//!
//! The iteration orthogonalizes the `min(m, n)` vectors on the short side of
//! the matrix: the columns when `m >= n`, otherwise the rows. Each converged
//! vector has norm `σᵢ`; normalizing it gives the long-side singular vector
//! and the accumulated rotations give the short-side one.

use super::matrix::{dot, Matrix};
use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// A pair `(i, j)` counts as orthogonal once `|vᵢ·vⱼ| <= TOL · ‖vᵢ‖‖vⱼ‖`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Singular values below `RANK_TOL · σ_max` are clamped to exactly zero.
pub const RANK_TOL: f64 = 1e-14;

/// Thin SVD `m = u · diag(sigma) · vᵀ` with `r = min(rows, cols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// `rows x r`, orthonormal columns.
    pub u: Matrix,
    /// Non-increasing, non-negative, length `r`.
    pub sigma: Vec<f64>,
    /// `cols x r`, orthonormal columns.
    pub v: Matrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > 0.0).count()
    }

    /// `u · diag(f(σᵢ)) · vᵀ`.
    pub fn recompose_with(&self, f: impl Fn(usize, f64) -> f64) -> Matrix {
        let d: Vec<f64> = self.sigma.iter().enumerate().map(|(i, &s)| f(i, s)).collect();
        self.u.scale_cols(&d).matmul_t(&self.v)
    }

    pub fn reconstruct(&self) -> Matrix {
        self.recompose_with(|_, s| s)
    }
}

/// Thin SVD of `m`. Deterministic: the first entry of each `u` column with
/// magnitude above 1e-12 is non-negative.
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if !m.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    let (rows, cols) = m.shape();
    let tall = rows >= cols;
    // `vecs` holds the short-side vectors as contiguous rows.
    let mut vecs = if tall { m.transpose() } else { m.clone() };
    let k = vecs.rows();
    let l = vecs.cols();
    let mut acc = Matrix::identity(k);
    jacobi_orthogonalize(&mut vecs, Some(&mut acc))?;

    let mut norms: Vec<f64> = (0..k).map(|i| dot(vecs.row(i), vecs.row(i)).sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite norms"));
    let smax = norms.iter().fold(0.0_f64, |a, &b| a.max(b));
    for s in norms.iter_mut() {
        if *s < RANK_TOL * smax || smax == 0.0 {
            *s = 0.0;
        }
    }

    // Long-side vectors (length l) and short-side vectors (length k), one per row.
    let mut long = Matrix::zeros(k, l);
    let mut short = Matrix::zeros(k, k);
    let mut sigma = Vec::with_capacity(k);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        short.row_mut(dst).copy_from_slice(acc.row(src));
        if s > 0.0 {
            for (o, &x) in long.row_mut(dst).iter_mut().zip(vecs.row(src)) {
                *o = x / s;
            }
        } else {
            deficient.push(dst);
        }
    }
    complete_basis(&mut long, &deficient);

    for i in 0..k {
        // `long` holds u-columns for tall inputs, `short` otherwise.
        let u_col = if tall { long.row(i) } else { short.row(i) };
        let flip = u_col.iter().find(|x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0);
        if flip {
            for x in long.row_mut(i) {
                *x = -*x;
            }
            for x in short.row_mut(i) {
                *x = -*x;
            }
        }
    }

    let (u, v) = if tall {
        (long.transpose(), short.transpose())
    } else {
        (short.transpose(), long.transpose())
    };
    Ok(SvdResult { u, sigma, v })
}

/// Singular values only, non-increasing, same clamping as [`svd`].
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    let mut vecs = if m.rows() >= m.cols() { m.transpose() } else { m.clone() };
    jacobi_orthogonalize(&mut vecs, None)?;
    let mut s: Vec<f64> = (0..vecs.rows()).map(|i| dot(vecs.row(i), vecs.row(i)).sqrt()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite norms"));
    let smax = s.first().copied().unwrap_or(0.0);
    for x in s.iter_mut() {
        if *x < RANK_TOL * smax {
            *x = 0.0;
        }
    }
    Ok(s)
}

/// Rotates the rows of `vecs` until they are mutually orthogonal, applying
/// the same rotations to the rows of `acc`.
fn jacobi_orthogonalize(vecs: &mut Matrix, mut acc: Option<&mut Matrix>) -> Result<()> {
    let k = vecs.rows();
    let l = vecs.cols();
    if k < 2 {
        return Ok(());
    }
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k - 1 {
            for j in (i + 1)..k {
                let (alpha, beta, gamma) = {
                    let data = vecs.data();
                    fused_dots(&data[i * l..(i + 1) * l], &data[j * l..(j + 1) * l])
                };
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= ORTHOGONALITY_TOL * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_rows(vecs, i, j, c, s);
                if let Some(a) = acc.as_deref_mut() {
                    rotate_rows(a, i, j, c, s);
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::SvdNoConvergence(MAX_SWEEPS))
}

/// `(‖a‖², ‖b‖², a·b)` in one pass.
#[inline]
fn fused_dots(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let n = a.len();
    let chunks = n / 2;
    let (mut aa0, mut aa1, mut bb0, mut bb1, mut ab0, mut ab1) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for c in 0..chunks {
        let i = 2 * c;
        let (x0, x1, y0, y1) = (a[i], a[i + 1], b[i], b[i + 1]);
        aa0 += x0 * x0;
        aa1 += x1 * x1;
        bb0 += y0 * y0;
        bb1 += y1 * y1;
        ab0 += x0 * y0;
        ab1 += x1 * y1;
    }
    let (mut aa, mut bb, mut ab) = (aa0 + aa1, bb0 + bb1, ab0 + ab1);
    if n % 2 == 1 {
        let (x, y) = (a[n - 1], b[n - 1]);
        aa += x * x;
        bb += y * y;
        ab += x * y;
    }
    (aa, bb, ab)
}

#[inline]
fn rotate_rows(m: &mut Matrix, i: usize, j: usize, c: f64, s: f64) {
    let l = m.cols();
    let (head, tail) = m.data_mut().split_at_mut(j * l);
    let ri = &mut head[i * l..(i + 1) * l];
    let rj = &mut tail[..l];
    for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Fills the rows listed in `missing` with unit vectors orthogonal to every
/// other row, drawing candidates from the standard basis in order.
fn complete_basis(rows: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let l = rows.cols();
    let mut filled: Vec<usize> = (0..rows.rows()).filter(|i| !missing.contains(i)).collect();
    // Rejected candidates keep a squared residual below 1/(4l), so together
    // they hold under 1/4 of the orthogonal complement and some unused
    // candidate always clears the bar.
    let min_norm = (0.25 / l as f64).sqrt();
    let mut candidate = 0usize;
    for &target in missing {
        loop {
            assert!(candidate < l, "basis completion ran out of candidates");
            let mut v = vec![0.0; l];
            v[candidate] = 1.0;
            candidate += 1;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for &f in &filled {
                    let r = rows.row(f);
                    let proj = dot(r, &v);
                    for (vi, &ri) in v.iter_mut().zip(r) {
                        *vi -= proj * ri;
                    }
                }
            }
            let n = dot(&v, &v).sqrt();
            if n > min_norm {
                for (o, x) in rows.row_mut(target).iter_mut().zip(&v) {
                    *o = x / n;
                }
                filled.push(target);
                break;
            }
        }
    }
}
