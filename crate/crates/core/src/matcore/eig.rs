//! Cyclic Jacobi eigensolver for symmetric matrices.

use super::matrix::Matrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Allowed `|x_ij - x_ji|`, relative to `max(1, max|x|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues (descending) with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEig {
    /// `V · diag(f(λ)) · Vᵀ`.
    pub fn recompose_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let d: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.vectors.scale_cols(&d).matmul_t(&self.vectors)
    }
}

fn check_symmetric(x: &Matrix) -> Result<()> {
    if x.rows() != x.cols() {
        return Err(Error::ShapeMismatch { expected: (x.rows(), x.rows()), got: x.shape() });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("eigensolver input".into()));
    }
    let asym = x.max_asymmetry();
    if asym > SYMMETRY_TOL * x.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix, sorted descending.
pub fn eig_sym(x: &Matrix) -> Result<Vec<f64>> {
    check_symmetric(x)?;
    let mut a = x.symmetrize();
    jacobi(&mut a, None)?;
    let mut vals: Vec<f64> = (0..a.rows()).map(|i| a.get(i, i)).collect();
    vals.sort_by(|p, q| q.partial_cmp(p).expect("finite eigenvalues"));
    Ok(vals)
}

/// Full symmetric eigendecomposition, eigenvalues descending.
pub fn eigh(x: &Matrix) -> Result<SymEig> {
    check_symmetric(x)?;
    let n = x.rows();
    let mut a = x.symmetrize();
    // Rows of `vt` are eigenvectors.
    let mut vt = Matrix::identity(n);
    jacobi(&mut a, Some(&mut vt))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| a.get(q, q).partial_cmp(&a.get(p, p)).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| vt.get(order[c], r));
    Ok(SymEig { values, vectors })
}

fn jacobi(a: &mut Matrix, mut vt: Option<&mut Matrix>) -> Result<()> {
    let n = a.rows();
    if n < 2 {
        return Ok(());
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(());
    }
    let floor = f64::MIN_POSITIVE.max(1e-18 * scale);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                if apq.abs() <= floor.max(1e-15 * (app.abs() * aqq.abs()).sqrt()) {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                apply_rotation(a, p, q, c, s);
                if let Some(v) = vt.as_deref_mut() {
                    let l = v.cols();
                    let (head, tail) = v.data_mut().split_at_mut(q * l);
                    let rp = &mut head[p * l..(p + 1) * l];
                    let rq = &mut tail[..l];
                    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
                        let (vp, vq) = (*x, *y);
                        *x = c * vp - s * vq;
                        *y = s * vp + c * vq;
                    }
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::EigNoConvergence(MAX_SWEEPS))
}

/// `A ← Jᵀ A J` for the Givens rotation in the (p, q) plane.
fn apply_rotation(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    let apq = a.get(p, q);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        let np = c * akp - s * akq;
        let nq = s * akp + c * akq;
        a.set(k, p, np);
        a.set(p, k, np);
        a.set(k, q, nq);
        a.set(q, k, nq);
    }
    a.set(p, p, c * c * app - 2.0 * s * c * apq + s * s * aqq);
    a.set(q, q, s * s * app + 2.0 * s * c * apq + c * c * aqq);
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(eig_sym(&Matrix::identity(4)).unwrap(), vec![1.0; 4]);
        assert_eq!(eig_sym(&Matrix::from_diag(&[9.0, 4.0, 1.0])).unwrap(), vec![9.0, 4.0, 1.0]);
        assert_eq!(eig_sym(&Matrix::from_diag(&[1.0, 9.0, 4.0])).unwrap(), vec![9.0, 4.0, 1.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let x = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_sym(&x), Err(Error::NotSymmetric(_))));
        assert!(eig_sym(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn indefinite_two_by_two() {
        let x = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eigh(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let back = e.recompose_with(|l| l);
        assert!(back.sub(&x).max_abs() < 1e-14);
    }
}
