use alloc::vec::Vec;

use super::GtdResult;
use crate::linalg::{complete_orthonormal, svd, validate_proper, Matrix};
use crate::math::FloatExt;
use crate::{tol, Error, Result};

/// Geometric mean decomposition `a = u · t · vᵀ` of a proper matrix: every
/// diagonal entry of the lower-triangular `t` equals the geometric mean of
/// the singular values, which is 1.
pub fn gmd(a: &Matrix) -> Result<GtdResult> {
    let report = validate_proper(a, tol::PROPER)?;
    if !report.is_proper() {
        return Err(Error::NotProper(report));
    }
    gmd_full_rank(a)
}

/// GMD of any full-row-rank matrix with `rows ≤ cols`.
pub(crate) fn gmd_full_rank(a: &Matrix) -> Result<GtdResult> {
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::RankDeficient {
            rank: n,
            required: m,
        });
    }
    let s = svd(a)?;
    let top = s.sigma[0];
    let rank = s.sigma.iter().filter(|&&x| x > tol::RANK * top).count();
    if rank < m {
        return Err(Error::RankDeficient { rank, required: m });
    }

    // diag(σ) = L·R·Qᵀ is symmetric, so diag(σ) = Q·Rᵀ·Lᵀ with Rᵀ lower
    let (left, upper, right) = equalize_diagonal(&s.sigma);
    let u = s.u.matmul(&right);
    let v_thin = s.v.matmul(&left);
    let lower = upper.transpose();

    let mut t = Matrix::zeros(m, n);
    t.set_block(0, 0, &lower);
    let v = complete_orthonormal(&v_thin);
    let diag = t.diagonal();
    Ok(GtdResult { u, t, v, diag })
}

/// Factors `diag(sigma) = left · upper · rightᵀ` with `upper` upper
/// triangular and every diagonal entry equal to the geometric mean of
/// `sigma`.
///
/// Each step pairs the largest remaining diagonal entry (at or above the
/// mean) with the smallest (at or below it), moves them to positions `k`
/// and `k + 1`, and applies one Givens rotation on each side so that
/// position `k` becomes the mean. Their product moves to `k + 1`, which
/// keeps the geometric mean of the unprocessed entries fixed.
fn equalize_diagonal(sigma: &[f64]) -> (Matrix, Matrix, Matrix) {
    let n = sigma.len();
    let mean = (sigma.iter().map(|s| s.ln()).sum::<f64>() / n as f64).exp();
    let mut r = Matrix::from_diag(n, n, sigma);
    let mut left = Matrix::identity(n);
    let mut right = Matrix::identity(n);

    for k in 0..n.saturating_sub(1) {
        let remaining: Vec<usize> = (k..n).collect();
        let p = *remaining
            .iter()
            .max_by(|&&i, &&j| r[(i, i)].total_cmp(&r[(j, j)]))
            .expect("nonempty");
        let q = *remaining
            .iter()
            .min_by(|&&i, &&j| r[(i, i)].total_cmp(&r[(j, j)]))
            .expect("nonempty");
        if r[(p, p)] - r[(q, q)] <= f64::EPSILON * mean {
            break;
        }
        symmetric_swap(&mut r, &mut left, &mut right, k, p);
        let q = if q == k { p } else { q };
        symmetric_swap(&mut r, &mut left, &mut right, k + 1, q);

        let (d1, d2) = (r[(k, k)], r[(k + 1, k + 1)]);
        let c2 = ((mean * mean - d2 * d2) / (d1 * d1 - d2 * d2)).clamp(0.0, 1.0);
        let c = c2.sqrt();
        let s = (1.0 - c2).sqrt();

        // right rotation on columns k, k+1: [c -s; s c]
        for i in 0..n {
            let (a, b) = (r[(i, k)], r[(i, k + 1)]);
            r[(i, k)] = c * a + s * b;
            r[(i, k + 1)] = -s * a + c * b;
            let (a, b) = (right[(i, k)], right[(i, k + 1)]);
            right[(i, k)] = c * a + s * b;
            right[(i, k + 1)] = -s * a + c * b;
        }
        // left rotation G = [c·d1, -s·d2; s·d2, c·d1] / mean, applied as Gᵀ on rows
        let (g11, g12, g21, g22) = (c * d1 / mean, -s * d2 / mean, s * d2 / mean, c * d1 / mean);
        for j in 0..n {
            let (a, b) = (r[(k, j)], r[(k + 1, j)]);
            r[(k, j)] = g11 * a + g21 * b;
            r[(k + 1, j)] = g12 * a + g22 * b;
            let (a, b) = (left[(j, k)], left[(j, k + 1)]);
            left[(j, k)] = a * g11 + b * g21;
            left[(j, k + 1)] = a * g12 + b * g22;
        }
        r[(k + 1, k)] = 0.0;
    }
    (left, r, right)
}

/// Swaps rows and columns `i`, `j` of `r` and the matching factor columns.
fn symmetric_swap(r: &mut Matrix, left: &mut Matrix, right: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = r.rows();
    for c in 0..n {
        let tmp = r[(i, c)];
        r[(i, c)] = r[(j, c)];
        r[(j, c)] = tmp;
    }
    for m in [&mut *r, &mut *left, &mut *right] {
        for row in 0..n {
            let tmp = m[(row, i)];
            m[(row, i)] = m[(row, j)];
            m[(row, j)] = tmp;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equalize_reconstructs() {
        let sigma = [8.0, 2.0, 0.5, 0.125];
        let (l, r, q) = equalize_diagonal(&sigma);
        let back = l.matmul(&r).matmul(&q.transpose());
        assert!(back.relative_error(&Matrix::from_diag(4, 4, &sigma)) < 1e-14);
        assert!(r.max_above_diagonal() > 0.0);
        for i in 0..4 {
            assert!((r[(i, i)] - 1.0).abs() < 1e-14);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
        assert!(l.orthonormality_residual() < 1e-14);
        assert!(q.orthonormality_residual() < 1e-14);
    }

    #[test]
    fn mirrored_diagonal() {
        let g = gmd(&Matrix::from_diag(2, 2, &[4.0, 0.25])).unwrap();
        assert!((g.diag[0] - 1.0).abs() < 1e-14 && (g.diag[1] - 1.0).abs() < 1e-14);
        assert!(
            g.reconstruct()
                .relative_error(&Matrix::from_diag(2, 2, &[4.0, 0.25]))
                < 1e-14
        );
        assert_eq!(g.t[(0, 1)], 0.0);
    }

    #[test]
    fn identity_is_fixed() {
        let g = gmd(&Matrix::identity(3)).unwrap();
        assert_eq!(g.u, Matrix::identity(3));
        assert_eq!(g.t, Matrix::identity(3));
        assert_eq!(g.v, Matrix::identity(3));
    }

    #[test]
    fn not_proper() {
        assert!(matches!(
            gmd(&Matrix::from_diag(2, 2, &[2.0, 2.0])),
            Err(Error::NotProper(_))
        ));
    }
}
