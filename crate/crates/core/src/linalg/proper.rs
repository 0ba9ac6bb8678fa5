use core::fmt;

use super::{svd, Matrix};
use crate::math::FloatExt;
use crate::{tol, Error, Result};

/// Outcome of checking a matrix against the proper-matrix conditions:
/// no more rows than columns, full row rank, and `det(H·Hᵀ) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub det_gram: f64,
    pub tol: f64,
}

impl ProperReport {
    pub fn shape_ok(&self) -> bool {
        self.rows <= self.cols
    }

    pub fn rank_ok(&self) -> bool {
        self.rank == self.rows
    }

    pub fn det_ok(&self) -> bool {
        (self.det_gram - 1.0).abs() <= self.tol
    }

    pub fn is_proper(&self) -> bool {
        self.shape_ok() && self.rank_ok() && self.det_ok()
    }
}

impl fmt::Display for ProperReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_proper() {
            return write!(f, "proper {}x{}", self.rows, self.cols);
        }
        let mut sep = "";
        if !self.shape_ok() {
            write!(f, "{}x{} has more rows than columns", self.rows, self.cols)?;
            sep = "; ";
        }
        if !self.rank_ok() {
            write!(f, "{sep}rank {} < {} rows", self.rank, self.rows)?;
            sep = "; ";
        }
        if !self.det_ok() {
            write!(
                f,
                "{sep}det(H·Hᵀ) = {} differs from 1 by more than {}",
                self.det_gram, self.tol
            )?;
        }
        Ok(())
    }
}

/// Checks the proper-matrix conditions, reporting every failed one.
pub fn validate_proper(h: &Matrix, tol: f64) -> Result<ProperReport> {
    let sigma = svd::singular_values(h)?;
    let top = sigma.first().copied().unwrap_or(0.0);
    let rank = if top > 0.0 {
        sigma.iter().filter(|&&s| s > tol::RANK * top).count()
    } else {
        0
    };
    let det_gram = if h.rows() <= h.cols() {
        sigma.iter().map(|s| s * s).product()
    } else {
        // H·Hᵀ has rows − cols zero eigenvalues
        0.0
    };
    Ok(ProperReport {
        rows: h.rows(),
        cols: h.cols(),
        rank,
        det_gram,
        tol,
    })
}

/// A proper channel matrix together with the total average power budget of
/// its transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperChannel {
    h: Matrix,
    power: f64,
    det_gram: f64,
}

impl ProperChannel {
    /// Validates `h` at tolerance `tol` and pairs it with `power`.
    pub fn new(h: Matrix, power: f64, tol: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidArgument("power must be positive and finite"));
        }
        let report = validate_proper(&h, tol)?;
        if !report.is_proper() {
            return Err(Error::NotProper(report));
        }
        Ok(Self {
            h,
            power,
            det_gram: report.det_gram,
        })
    }

    /// Validates at the default tolerance.
    pub fn with_power(h: Matrix, power: f64) -> Result<Self> {
        Self::new(h, power, tol::PROPER)
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.h
    }

    #[inline]
    pub fn power(&self) -> f64 {
        self.power
    }

    #[inline]
    pub fn det_gram(&self) -> f64 {
        self.det_gram
    }

    /// Receive dimension `N_r`.
    #[inline]
    pub fn n_r(&self) -> usize {
        self.h.rows()
    }

    /// Transmit dimension `N_t`.
    #[inline]
    pub fn n_t(&self) -> usize {
        self.h.cols()
    }

    /// Same matrix with a different power budget.
    pub fn with_budget(&self, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidArgument("power must be positive and finite"));
        }
        Ok(Self {
            power,
            ..self.clone()
        })
    }
}

/// Rescales a full-row-rank `h` to unit `det(H·Hᵀ)`, moving the gain into
/// the power budget so that the effective SNR is unchanged.
///
/// With `a = det(H·Hᵀ)` the result is `(h / a^(1/(2·N_r)), power · a^(1/N_r))`.
pub fn normalize_to_proper(h: &Matrix, power: f64) -> Result<ProperChannel> {
    let report = validate_proper(h, tol::PROPER)?;
    if !report.shape_ok() || !report.rank_ok() {
        return Err(Error::RankDeficient {
            rank: report.rank,
            required: h.rows(),
        });
    }
    if report.is_proper() && (report.det_gram - 1.0).abs() <= 1e-14 {
        return ProperChannel::new(h.clone(), power, tol::PROPER);
    }
    let n_r = h.rows() as f64;
    let a = report.det_gram;
    let scaled = h.scale(1.0 / a.powf(1.0 / (2.0 * n_r)));
    ProperChannel::new(scaled, power * a.powf(1.0 / n_r), tol::PROPER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn mirrored_asymmetric_diagonal_is_proper() {
        let r = validate_proper(&Matrix::from_diag(2, 2, &[0.25, 4.0]), tol::PROPER).unwrap();
        assert!(r.is_proper());
    }

    #[test]
    fn scaled_identity_rejected_with_det() {
        let r = validate_proper(&Matrix::from_diag(2, 2, &[2.0, 2.0]), tol::PROPER).unwrap();
        assert!(!r.is_proper());
        assert!((r.det_gram - 16.0).abs() < 1e-12);
        assert!(r.shape_ok() && r.rank_ok() && !r.det_ok());
    }

    #[test]
    fn tall_rejected() {
        let h = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        let r = validate_proper(&h, tol::PROPER).unwrap();
        assert!(!r.shape_ok());
        assert!(r.to_string().contains("more rows than columns"));
    }

    #[test]
    fn normalization_examples() {
        let c = normalize_to_proper(&Matrix::from_diag(2, 2, &[2.0, 2.0]), 1.0).unwrap();
        assert!(c.matrix().relative_error(&Matrix::identity(2)) < 1e-15);
        assert!((c.power() - 4.0).abs() < 1e-12);

        // a = 16: the matrix is halved, so the power grows by 2² = a^(1/2)
        let c = normalize_to_proper(&Matrix::from_diag(2, 2, &[8.0, 0.5]), 4.0).unwrap();
        assert!(
            c.matrix()
                .relative_error(&Matrix::from_diag(2, 2, &[4.0, 0.25]))
                < 1e-15
        );
        assert!((c.power() - 16.0).abs() < 1e-12);

        let h = Matrix::from_diag(2, 2, &[0.25, 4.0]);
        let c = normalize_to_proper(&h, 3.0).unwrap();
        assert_eq!(c.matrix(), &h);
        assert_eq!(c.power(), 3.0);
    }

    #[test]
    fn normalization_rejects_rank_deficient() {
        let h = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(
            normalize_to_proper(&h, 1.0),
            Err(Error::RankDeficient { .. })
        ));
    }
}
