//! Dense real linear algebra: the matrix container, thin SVD, symmetric
//! eigendecomposition and Schatten norms.

mod eig;
pub mod mat1;
mod matrix;
mod norms;
pub mod random;
mod svd;

pub use eig::{eig_sym, eigh, SymEig};
pub use matrix::Matrix;
pub use norms::{lq_norm, nuclear_norm, schatten_norm, spectral_norm};
pub use svd::{singular_values, svd, SvdResult};


