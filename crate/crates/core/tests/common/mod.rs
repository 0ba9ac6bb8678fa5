#![allow(dead_code)]

use dmac_core::linalg::normalize_to_proper;
use dmac_core::Matrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Gaussian matrix rescaled to unit `det(H·Hᵀ)`.
pub fn random_proper(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    let h = gaussian(rng, rows, cols);
    normalize_to_proper(&h, 1.0).unwrap().matrix().clone()
}

/// Random shape with `2 ≤ rows ≤ max_rows` and `rows ≤ cols ≤ max_cols`.
pub fn random_shape(rng: &mut StdRng, max_rows: usize, max_cols: usize) -> (usize, usize) {
    let rows = rng.random_range(2..=max_rows);
    let cols = rng.random_range(rows..=max_cols);
    (rows, cols)
}

/// Orthogonal matrix from Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal(rng: &mut StdRng, n: usize) -> Matrix {
    let g = gaussian(rng, n, n);
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.col(j);
        for k in 0..j {
            let qk = q.col(k);
            let dot: f64 = v.iter().zip(&qk).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&qk).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        q.set_col(j, &v);
    }
    q
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        d *= m[k][k];
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot = &top[k];
        for row in rest {
            let f = row[k] / pivot[k];
            for (x, p) in row[k..].iter_mut().zip(&pivot[k..]) {
                *x -= f * p;
            }
        }
    }
    d
}

/// `½·log₂ det(I + H·K·Hᵀ)` evaluated with the elimination determinant.
pub fn mutual_information(h: &Matrix, k: &Matrix) -> f64 {
    let g = h.matmul(k).matmul(&h.transpose());
    let mut m = g;
    for i in 0..m.rows() {
        m[(i, i)] += 1.0;
    }
    0.5 * det(&m).log2()
}

/// Singular values from a cyclic Jacobi eigenvalue iteration on `A·Aᵀ`.
pub fn singular_values_by_jacobi(a: &Matrix) -> Vec<f64> {
    let mut g = a.matmul(&a.transpose());
    let n = g.rows();
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += g[(p, q)] * g[(p, q)];
                if g[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (g[(q, q)] - g[(p, p)]) / g[(p, q)];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (gkp, gkq) = (g[(k, p)], g[(k, q)]);
                    g[(k, p)] = c * gkp - s * gkq;
                    g[(k, q)] = s * gkp + c * gkq;
                }
                for k in 0..n {
                    let (gpk, gqk) = (g[(p, k)], g[(q, k)]);
                    g[(p, k)] = c * gpk - s * gqk;
                    g[(q, k)] = s * gpk + c * gqk;
                }
            }
        }
        if off < 1e-30 {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n).map(|i| g[(i, i)].max(0.0).sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
