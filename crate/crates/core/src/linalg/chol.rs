use super::Matrix;
use crate::math::FloatExt;
use crate::{Error, Result};

/// Lower Cholesky factor `l` of a symmetric positive definite `a = l·lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            what: "cholesky needs a square matrix",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let d = a[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if d.is_nan() || d <= 0.0 {
            return Err(Error::RankDeficient {
                rank: j,
                required: n,
            });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let s = a[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// `log₂ det(a)` for symmetric positive definite `a`.
pub fn log2_det_spd(a: &Matrix) -> Result<f64> {
    let l = cholesky(a)?;
    Ok(2.0 * l.diagonal().iter().map(|d| d.log2()).sum::<f64>())
}
