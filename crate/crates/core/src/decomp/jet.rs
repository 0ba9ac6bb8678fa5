use alloc::vec;
use alloc::vec::Vec;

use super::gmd::gmd_full_rank;
use crate::linalg::{householder_qr, qr_lower_unchecked, validate_proper, Matrix};
use crate::{tol, Error, Result};

/// Which side carries the orthogonal factor common to all matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `A_k = U_k · T_k · Vᵀ` with `V` shared.
    SharedRight,
    /// `H_k = U · T_k · V_kᵀ` with `U` shared (receiver side).
    SharedLeft,
}

/// Per-matrix part of a joint triangularization.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFactor {
    /// `U_k` for [`Orientation::SharedRight`], `V_k` for [`Orientation::SharedLeft`].
    pub orthogonal: Matrix,
    pub triangular: Matrix,
}

/// Joint triangularization of several matrices sharing one orthogonal factor.
///
/// The verifier in [`super::verify_joint_triangularization`] accepts any
/// instance of this type, including externally constructed factors with
/// orthonormal (not necessarily square) columns.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTriangularization {
    pub shared: Matrix,
    pub per_matrix: Vec<JointFactor>,
    /// Common diagonal of the triangular factors.
    pub diag: Vec<f64>,
    pub orientation: Orientation,
}

impl JointTriangularization {
    /// Reassembles the `k`-th matrix from its factors.
    pub fn reconstruct(&self, k: usize) -> Matrix {
        let f = &self.per_matrix[k];
        match self.orientation {
            Orientation::SharedRight => f
                .orthogonal
                .matmul(&f.triangular)
                .matmul(&self.shared.transpose()),
            Orientation::SharedLeft => self
                .shared
                .matmul(&f.triangular)
                .matmul(&f.orthogonal.transpose()),
        }
    }
}

/// Joint equi-diagonal triangularization `A_k = U_k · T_k · Vᵀ`.
///
/// Both inputs have the same column count `N` and at least as many rows;
/// their transposes must be proper. The `T_k` are `M_k × N` lower
/// triangular with equal, positive diagonals.
pub fn jet_shared_right(a1: &Matrix, a2: &Matrix) -> Result<JointTriangularization> {
    if a1.cols() != a2.cols() {
        return Err(Error::DimensionMismatch {
            what: "column count",
            expected: a1.cols(),
            found: a2.cols(),
        });
    }
    for a in [a1, a2] {
        let report = validate_proper(&a.transpose(), tol::PROPER)?;
        if !report.is_proper() {
            return Err(Error::NotProper(report));
        }
    }
    let n = a1.cols();

    // A_k = W_k·[S_k; 0] with S_k square upper triangular, |det S_k| = 1
    let (w1, r1) = householder_qr(a1);
    let (w2, r2) = householder_qr(a2);
    let s1 = r1.submatrix(0, n, 0, n);
    let s2 = r2.submatrix(0, n, 0, n);

    let sq = square_jet(&s1, &s2)?;

    let mut factors = Vec::with_capacity(2);
    for (w, u, t) in [(&w1, &sq.u1, &sq.t1), (&w2, &sq.u2, &sq.t2)] {
        let m = w.rows();
        let pad = Matrix::identity(m - n);
        let embedded = if m > n {
            Matrix::block_diag(&[u, &pad])
        } else {
            u.clone()
        };
        let mut tall = Matrix::zeros(m, n);
        tall.set_block(0, 0, t);
        factors.push(JointFactor {
            orthogonal: w.matmul(&embedded),
            triangular: tall,
        });
    }
    let diag = common_diagonal(&factors);
    Ok(JointTriangularization {
        shared: sq.v,
        per_matrix: factors,
        diag,
        orientation: Orientation::SharedRight,
    })
}

/// Joint equi-diagonal triangularization `H_k = U · T_k · V_kᵀ` of two
/// proper matrices with the same row count, as used by the two-user scheme:
/// `U` is applied at the common receiver, `V_k` at transmitter `k`.
///
/// Computed from [`jet_shared_right`] on `H_kᵀ` with reversed columns; the
/// reversal keeps the result lower triangular after transposing back.
pub fn jet_shared_left(h1: &Matrix, h2: &Matrix) -> Result<JointTriangularization> {
    if h1.rows() != h2.rows() {
        return Err(Error::DimensionMismatch {
            what: "row count",
            expected: h1.rows(),
            found: h2.rows(),
        });
    }
    for h in [h1, h2] {
        let report = validate_proper(h, tol::PROPER)?;
        if !report.is_proper() {
            return Err(Error::NotProper(report));
        }
    }
    let n_r = h1.rows();
    let right = jet_shared_right(
        &h1.transpose().reverse_cols(),
        &h2.transpose().reverse_cols(),
    )?;

    let per_matrix: Vec<JointFactor> = right
        .per_matrix
        .iter()
        .map(|f| JointFactor {
            orthogonal: f.orthogonal.reverse_leading_cols(n_r),
            triangular: f
                .triangular
                .transpose()
                .reverse_rows()
                .reverse_leading_cols(n_r),
        })
        .collect();
    let mut diag = right.diag;
    diag.reverse();
    Ok(JointTriangularization {
        shared: right.shared.reverse_rows().reverse_cols(),
        per_matrix,
        diag,
        orientation: Orientation::SharedLeft,
    })
}

struct SquareJet {
    u1: Matrix,
    u2: Matrix,
    v: Matrix,
    t1: Matrix,
    t2: Matrix,
}

/// `S_k = U_k · T_k · Vᵀ` for square nonsingular `s1`, `s2` (with `s2` upper
/// triangular) of equal `|det|`.
///
/// The GMD `S1·S2⁻¹ = Q·L·Pᵀ` has unit diagonal. Triangularizing
/// `Pᵀ·S2 = T2·Vᵀ` then gives `S1 = Q·(L·T2)·Vᵀ`, and `L·T2` has the same
/// diagonal as `T2`.
fn square_jet(s1: &Matrix, s2: &Matrix) -> Result<SquareJet> {
    let ratio = right_divide_upper(s1, s2);
    let g = gmd_full_rank(&ratio)?;
    let f = qr_lower_unchecked(&g.v.transpose().matmul(s2));
    let mut t1 = g.u.transpose().matmul(s1).matmul(&f.q);
    t1.make_lower();
    Ok(SquareJet {
        u1: g.u,
        u2: g.v,
        v: f.q,
        t1,
        t2: f.t,
    })
}

/// `a · r⁻¹` for upper triangular nonsingular `r`, by forward substitution
/// along each row.
fn right_divide_upper(a: &Matrix, r: &Matrix) -> Matrix {
    let n = r.rows();
    let mut out = Matrix::zeros(a.rows(), n);
    let mut x = vec![0.0; n];
    for i in 0..a.rows() {
        for j in 0..n {
            let acc: f64 = (0..j).map(|k| x[k] * r[(k, j)]).sum();
            x[j] = (a[(i, j)] - acc) / r[(j, j)];
        }
        for (j, &xj) in x.iter().enumerate() {
            out[(i, j)] = xj;
        }
    }
    out
}

fn common_diagonal(factors: &[JointFactor]) -> Vec<f64> {
    let n = factors[0]
        .triangular
        .rows()
        .min(factors[0].triangular.cols());
    (0..n)
        .map(|i| factors.iter().map(|f| f.triangular[(i, i)]).sum::<f64>() / factors.len() as f64)
        .collect()
}
