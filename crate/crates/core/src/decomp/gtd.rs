use alloc::vec::Vec;

use crate::linalg::{complete_orthonormal, qr_lower, svd, Matrix};
use crate::math::FloatExt;
use crate::{tol, Error, Result};

/// Generalized triangular decomposition `a = u · t · vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GtdResult {
    /// `N_r × N_r` orthogonal.
    pub u: Matrix,
    /// `N_r × N_t` generalized lower triangular.
    pub t: Matrix,
    /// `N_t × N_t` orthogonal.
    pub v: Matrix,
    /// Diagonal of `t`.
    pub diag: Vec<f64>,
}

/// Residuals of a single-matrix decomposition against its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtdCheck {
    pub reconstruction: f64,
    pub above_diagonal: f64,
    pub orthonormality_u: f64,
    pub orthonormality_v: f64,
    pub pass: bool,
}

impl GtdResult {
    pub fn reconstruct(&self) -> Matrix {
        self.u.matmul(&self.t).matmul(&self.v.transpose())
    }

    /// Checks reconstruction, triangularity and orthonormality of the
    /// factors against the default tolerances, with `reconstruction_tol`
    /// replacing the relative Frobenius bound.
    pub fn check(&self, a: &Matrix, reconstruction_tol: f64) -> GtdCheck {
        let reconstruction = if self.reconstructable(a) {
            self.reconstruct().relative_error(a)
        } else {
            f64::INFINITY
        };
        let above_diagonal = self.t.max_above_diagonal();
        let orthonormality_u = self.u.orthonormality_residual();
        let orthonormality_v = self.v.orthonormality_residual();
        GtdCheck {
            reconstruction,
            above_diagonal,
            orthonormality_u,
            orthonormality_v,
            pass: reconstruction <= reconstruction_tol
                && above_diagonal <= tol::TRIANGULARITY
                && orthonormality_u <= tol::ORTHONORMALITY
                && orthonormality_v <= tol::ORTHONORMALITY,
        }
    }

    fn reconstructable(&self, a: &Matrix) -> bool {
        self.u.cols() == self.t.rows()
            && self.t.cols() == self.v.cols()
            && (self.u.rows(), self.v.rows()) == a.shape()
    }
}

/// The SVD viewed as a GTD: `t = [diag(σ) 0]`, full orthogonal `v`.
pub fn svd_gtd(a: &Matrix) -> Result<GtdResult> {
    if a.rows() > a.cols() {
        return Err(Error::RankDeficient {
            rank: a.cols(),
            required: a.rows(),
        });
    }
    let s = svd(a)?;
    let t = Matrix::from_diag(a.rows(), a.cols(), &s.sigma);
    Ok(GtdResult {
        u: s.u,
        v: complete_orthonormal(&s.v),
        diag: s.sigma,
        t,
    })
}

/// The transmit-side QR (`a = t · qᵀ`) viewed as a GTD with `u = I`.
pub fn qr_gtd(a: &Matrix) -> Result<GtdResult> {
    let f = qr_lower(a)?;
    Ok(GtdResult {
        u: Matrix::identity(a.rows()),
        diag: f.t.diagonal(),
        t: f.t,
        v: f.q,
    })
}

/// Whether a GTD with the `prescribed` diagonal exists for a matrix with
/// singular values `sigma`.
///
/// That is the case iff the sorted prescribed values are multiplicatively
/// majorized by the singular values: every leading partial product is at
/// most the corresponding one of `sigma`, with equality for the full
/// product. Comparisons are made on logarithms with relative slack `1e-10`.
pub fn gtd_feasible(sigma: &[f64], prescribed: &[f64]) -> Result<bool> {
    if sigma.len() != prescribed.len() {
        return Err(Error::LengthMismatch {
            expected: sigma.len(),
            found: prescribed.len(),
        });
    }
    if sigma
        .iter()
        .chain(prescribed)
        .any(|&x| !(x > 0.0 && x.is_finite()))
    {
        return Err(Error::InvalidArgument(
            "singular values and diagonal must be positive",
        ));
    }
    let mut s: Vec<f64> = sigma.to_vec();
    let mut p: Vec<f64> = prescribed.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    p.sort_by(|a, b| b.total_cmp(a));

    const SLACK: f64 = 1e-10;
    let (mut log_s, mut log_p) = (0.0, 0.0);
    for (a, b) in s.iter().zip(&p) {
        log_s += a.ln();
        log_p += b.ln();
        if log_p > log_s + SLACK {
            return Ok(false);
        }
    }
    Ok((log_p - log_s).abs() <= SLACK)
}
