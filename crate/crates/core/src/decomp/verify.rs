use alloc::vec::Vec;

use super::{JointTriangularization, Orientation};
use crate::linalg::Matrix;
use crate::{tol, Error, Result};

/// Acceptance thresholds for [`verify_joint_triangularization`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub orthonormality: f64,
    /// Relative Frobenius bound on the defining-equation residual.
    pub reconstruction: f64,
    pub triangularity: f64,
    pub diagonal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: tol::ORTHONORMALITY,
            reconstruction: tol::RECONSTRUCTION,
            triangularity: tol::TRIANGULARITY,
            diagonal: tol::DIAGONAL,
        }
    }
}

/// Residuals for one matrix of a joint triangularization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorCheck {
    /// `‖Uᵀ·H·V − T‖_F`.
    pub reconstruction_abs: f64,
    /// `reconstruction_abs / ‖H‖_F`.
    pub reconstruction_rel: f64,
    pub above_diagonal: f64,
    pub orthonormality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointReport {
    pub factors: Vec<FactorCheck>,
    pub shared_orthonormality: f64,
    /// `max_i max_{k,l} |T_{k;ii} − T_{l;ii}|`.
    pub diagonal_disparity: f64,
    /// `max_i max_k |T_{k;ii} − diag_i|` against the declared common diagonal.
    pub declared_diagonal_error: f64,
    pub pass: bool,
}

/// Checks the defining equations of a joint triangularization.
///
/// The residual is measured as `Uᵀ·H_k·V_k − T_k` (with the roles of the
/// factors following the orientation), which equals the reconstruction
/// error for square orthogonal factors and also covers factors with
/// orthonormal columns only, such as truncated time-extended ones.
pub fn verify_joint_triangularization(
    jt: &JointTriangularization,
    originals: &[Matrix],
    tolerances: &Tolerances,
) -> Result<JointReport> {
    if originals.len() != jt.per_matrix.len() {
        return Err(Error::DimensionMismatch {
            what: "number of matrices",
            expected: jt.per_matrix.len(),
            found: originals.len(),
        });
    }
    let mut factors = Vec::with_capacity(originals.len());
    for (f, h) in jt.per_matrix.iter().zip(originals) {
        let (left, right) = match jt.orientation {
            Orientation::SharedLeft => (&jt.shared, &f.orthogonal),
            Orientation::SharedRight => (&f.orthogonal, &jt.shared),
        };
        if left.rows() != h.rows() {
            return Err(Error::DimensionMismatch {
                what: "left factor rows",
                expected: h.rows(),
                found: left.rows(),
            });
        }
        if right.rows() != h.cols() {
            return Err(Error::DimensionMismatch {
                what: "right factor rows",
                expected: h.cols(),
                found: right.rows(),
            });
        }
        if f.triangular.shape() != (left.cols(), right.cols()) {
            return Err(Error::DimensionMismatch {
                what: "triangular factor rows",
                expected: left.cols(),
                found: f.triangular.rows(),
            });
        }
        let projected = left.transpose().matmul(h).matmul(right);
        let abs = (&projected - &f.triangular).frobenius_norm();
        let scale = h.frobenius_norm();
        factors.push(FactorCheck {
            reconstruction_abs: abs,
            reconstruction_rel: if scale > 0.0 { abs / scale } else { abs },
            above_diagonal: f.triangular.max_above_diagonal(),
            orthonormality: f.orthogonal.orthonormality_residual(),
        });
    }

    let n = jt.diag.len();
    let mut diagonal_disparity = 0.0f64;
    let mut declared_diagonal_error = 0.0f64;
    for f in &jt.per_matrix {
        if f.triangular.rows().min(f.triangular.cols()) != n {
            return Err(Error::DimensionMismatch {
                what: "diagonal length",
                expected: n,
                found: f.triangular.rows().min(f.triangular.cols()),
            });
        }
        for i in 0..n {
            declared_diagonal_error =
                declared_diagonal_error.max((f.triangular[(i, i)] - jt.diag[i]).abs());
            for g in &jt.per_matrix {
                diagonal_disparity =
                    diagonal_disparity.max((f.triangular[(i, i)] - g.triangular[(i, i)]).abs());
            }
        }
    }
    let shared_orthonormality = jt.shared.orthonormality_residual();

    let pass = shared_orthonormality <= tolerances.orthonormality
        && diagonal_disparity <= tolerances.diagonal
        && declared_diagonal_error <= tolerances.diagonal
        && factors.iter().all(|c| {
            c.reconstruction_rel <= tolerances.reconstruction
                && c.above_diagonal <= tolerances.triangularity
                && c.orthonormality <= tolerances.orthonormality
        });
    Ok(JointReport {
        factors,
        shared_orthonormality,
        diagonal_disparity,
        declared_diagonal_error,
        pass,
    })
}
