//! Dense real linear algebra: the matrix type, orthogonal factorizations and
//! the proper-matrix conditions every channel must satisfy.

mod chol;
mod matrix;
mod proper;
mod qr;
mod svd;

pub use chol::{cholesky, log2_det_spd};
pub use matrix::Matrix;
pub use proper::{normalize_to_proper, validate_proper, ProperChannel, ProperReport};
pub(crate) use qr::qr_lower_unchecked;
pub use qr::{complete_orthonormal, householder_qr, qr_lower, QrLower};
pub use svd::{numerical_rank, singular_values, svd, Svd};
