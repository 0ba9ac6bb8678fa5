use alloc::vec;
use alloc::vec::Vec;

use super::qr::complete_orthonormal;
use super::Matrix;
use crate::math::FloatExt;
use crate::{tol, Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `a = u · diag(sigma) · vᵀ`.
///
/// With `r = min(rows, cols)`, `u` is `rows × r`, `v` is `cols × r`, both
/// with orthonormal columns, and `sigma` is sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let r = self.sigma.len();
        let mut us = self.u.clone();
        for j in 0..r {
            for i in 0..us.rows() {
                us[(i, j)] *= self.sigma[j];
            }
        }
        us.matmul(&self.v.transpose())
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let Svd { u, sigma, v } = jacobi_tall(&a.transpose())?;
        Ok(Svd { u: v, sigma, v: u })
    }
}

pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    svd(a).map(|s| s.sigma)
}

/// Number of singular values above `tol::RANK` times the largest.
pub fn numerical_rank(a: &Matrix) -> Result<usize> {
    let sigma = singular_values(a)?;
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|&&s| s > tol::RANK * top).count())
}

fn jacobi_tall(a: &Matrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = w
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let nonzero = sigma.iter().take_while(|&&s| s > 0.0).count();

    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        if k < nonzero {
            let col: Vec<f64> = w[j].iter().map(|x| x / norms[j]).collect();
            u.set_col(k, &col);
        }
        vm.set_col(k, &v[j]);
    }
    if nonzero < n {
        let basis = if nonzero == 0 {
            Matrix::identity(m)
        } else {
            complete_orthonormal(&u.submatrix(0, m, 0, nonzero))
        };
        for k in nonzero..n {
            u.set_col(k, &basis.col(k));
        }
    }
    Ok(Svd { u, sigma, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
