use alloc::vec::Vec;

use super::{numerical_rank, Matrix};
use crate::math::FloatExt;
use crate::{Error, Result};

/// Householder QR: `a = q · r` with `q` square orthogonal and `r` upper
/// (generalized) triangular of the same shape as `a`.
pub fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    let (m, n) = a.shape();
    let mut r = a.clone();
    let mut q = Matrix::identity(m);
    let mut v = Vec::with_capacity(m);

    for k in 0..n.min(m.saturating_sub(1)) {
        let below = ((k + 1)..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>();
        if below == 0.0 {
            continue;
        }
        let norm = (r[(k, k)] * r[(k, k)] + below).sqrt();
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        v.clear();
        v.extend((k..m).map(|i| r[(i, k)]));
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);

        for j in k..n {
            let dot: f64 = v.iter().enumerate().map(|(t, vt)| vt * r[(k + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                r[(k + t, j)] -= 2.0 * vt * dot;
            }
        }
        for i in 0..m {
            let dot: f64 = v.iter().enumerate().map(|(t, vt)| q[(i, k + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                q[(i, k + t)] -= 2.0 * dot * vt;
            }
        }
        r[(k, k)] = alpha;
        for i in (k + 1)..m {
            r[(i, k)] = 0.0;
        }
    }
    (q, r)
}

/// Extends orthonormal columns `q` (`m × r`) to an `m × m` orthogonal matrix
/// whose first `r` columns are exactly `q`.
pub fn complete_orthonormal(q: &Matrix) -> Matrix {
    let (m, r) = q.shape();
    if r >= m {
        return q.clone();
    }
    let (full, _) = householder_qr(q);
    let mut out = Matrix::zeros(m, m);
    out.set_block(0, 0, q);
    out.set_block(0, r, &full.submatrix(0, m, r, m));
    out
}

/// Lower-triangular orthogonal factorization `a = t · qᵀ`.
///
/// This is the RQ orientation used by the transmit-side schemes: `q` acts
/// only on the transmitter side and the receiver needs no processing.
#[derive(Debug, Clone)]
pub struct QrLower {
    /// `N_t × N_t` orthogonal.
    pub q: Matrix,
    /// `N_r × N_t` generalized lower triangular with nonnegative diagonal.
    pub t: Matrix,
}

impl QrLower {
    pub fn reconstruct(&self) -> Matrix {
        self.t.matmul(&self.q.transpose())
    }
}

/// Factors a full-row-rank `a` (`rows ≤ cols`) as `a = t · qᵀ`.
pub fn qr_lower(a: &Matrix) -> Result<QrLower> {
    let rank = numerical_rank(a)?;
    if rank < a.rows() {
        return Err(Error::RankDeficient {
            rank,
            required: a.rows(),
        });
    }
    Ok(qr_lower_unchecked(a))
}

pub(crate) fn qr_lower_unchecked(a: &Matrix) -> QrLower {
    let (mut q, r) = householder_qr(&a.transpose());
    let mut t = r.transpose();
    for j in 0..t.rows() {
        if t[(j, j)] < 0.0 {
            for i in 0..t.rows() {
                t[(i, j)] = -t[(i, j)];
            }
            for i in 0..q.rows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    t.make_lower();
    QrLower { q, t }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed() {
        let f = qr_lower(&Matrix::identity(3)).unwrap();
        assert_eq!(f.q, Matrix::identity(3));
        assert_eq!(f.t, Matrix::identity(3));
    }

    #[test]
    fn swap_matrix() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let f = qr_lower(&a).unwrap();
        assert!(f.q.orthonormality_residual() < 1e-12);
        assert!(f.reconstruct().relative_error(&a) < 1e-12);
        assert!(((f.t[(0, 0)] * f.t[(1, 1)]).abs() - 1.0).abs() < 1e-12);
        assert_eq!(f.t[(0, 1)], 0.0);
    }

    #[test]
    fn lower_input_keeps_its_diagonal() {
        let a = Matrix::from_rows(&[[2.0, 0.0], [3.0, 0.5]]);
        let f = qr_lower(&a).unwrap();
        assert!((f.t[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((f.t[(1, 1)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_and_tall_rejected() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]);
        assert!(matches!(
            qr_lower(&a),
            Err(Error::RankDeficient {
                rank: 1,
                required: 2
            })
        ));
        let tall = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(qr_lower(&tall), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn completion_keeps_leading_columns() {
        let s = 0.5f64.sqrt();
        let q = Matrix::from_rows(&[[s, 0.0], [s, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        let full = complete_orthonormal(&q);
        assert_eq!(full.submatrix(0, 4, 0, 2), q);
        assert!(full.orthonormality_residual() < 1e-12);
    }
}
