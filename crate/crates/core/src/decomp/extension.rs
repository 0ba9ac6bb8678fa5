use alloc::vec::Vec;

use crate::linalg::{validate_proper, Matrix};
use crate::{tol, Error, Result};

/// Block-diagonal lifting `I_N ⊗ H_k` of `K` channels over `N` channel uses.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeExtension {
    pub n_blocks: usize,
    pub base_rows: usize,
    pub users: usize,
    pub extended: Vec<Matrix>,
    /// `Ñ = N − N_r^(K−2) + 1`, the blocks left after truncating the rows
    /// for which joint triangularization is not guaranteed.
    pub truncated_rows: usize,
}

impl TimeExtension {
    /// `Ñ / N`.
    pub fn efficiency(&self) -> f64 {
        self.truncated_rows as f64 / self.n_blocks as f64
    }
}

/// Smallest block count `N_r^(K−2)` for which `Ñ ≥ 1`; `None` on overflow.
pub fn required_blocks(n_r: usize, users: usize) -> Option<usize> {
    let exp = u32::try_from(users.checked_sub(2)?).ok()?;
    n_r.checked_pow(exp)
}

/// `Ñ = N − N_r^(K−2) + 1`.
pub fn truncated_blocks(n_r: usize, users: usize, n_blocks: usize) -> Result<usize> {
    if n_r == 0 || users < 2 || n_blocks == 0 {
        return Err(Error::InvalidArgument("need N_r >= 1, K >= 2 and N >= 1"));
    }
    match required_blocks(n_r, users) {
        Some(required) if n_blocks >= required => Ok(n_blocks - required + 1),
        Some(required) => Err(Error::TooFewBlocks {
            blocks: n_blocks,
            required,
        }),
        None => Err(Error::TooFewBlocks {
            blocks: n_blocks,
            required: usize::MAX,
        }),
    }
}

/// Fraction `Ñ/N` of the time-extended dimensions that carry data.
/// Nondecreasing in `N` and tends to 1.
pub fn extension_efficiency(n_r: usize, users: usize, n_blocks: usize) -> Result<f64> {
    Ok(truncated_blocks(n_r, users, n_blocks)? as f64 / n_blocks as f64)
}

/// Builds `I_N ⊗ H_k` for every channel.
pub fn build_time_extension(channels: &[Matrix], n_blocks: usize) -> Result<TimeExtension> {
    if channels.len() < 2 {
        return Err(Error::InvalidArgument(
            "time extension needs at least two users",
        ));
    }
    let n_r = channels[0].rows();
    for h in channels {
        if h.rows() != n_r {
            return Err(Error::DimensionMismatch {
                what: "row count",
                expected: n_r,
                found: h.rows(),
            });
        }
        let report = validate_proper(h, tol::PROPER)?;
        if !report.is_proper() {
            return Err(Error::NotProper(report));
        }
    }
    let truncated_rows = truncated_blocks(n_r, channels.len(), n_blocks)?;
    Ok(TimeExtension {
        n_blocks,
        base_rows: n_r,
        users: channels.len(),
        extended: channels.iter().map(|h| h.kron_identity(n_blocks)).collect(),
        truncated_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_counts() {
        assert_eq!(truncated_blocks(2, 3, 9).unwrap(), 8);
        assert_eq!(truncated_blocks(2, 4, 10).unwrap(), 7);
        assert_eq!(truncated_blocks(3, 2, 5).unwrap(), 5);
        assert!(matches!(
            truncated_blocks(2, 4, 3),
            Err(Error::TooFewBlocks {
                blocks: 3,
                required: 4
            })
        ));
        assert!(matches!(
            truncated_blocks(8, 40, 10),
            Err(Error::TooFewBlocks { .. })
        ));
    }

    #[test]
    fn efficiency_values() {
        assert!((extension_efficiency(2, 3, 9).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(extension_efficiency(2, 2, 5).unwrap(), 1.0);
        assert!(extension_efficiency(2, 3, 1_000_000).unwrap() >= 0.999998);
    }

    #[test]
    fn builds_block_diagonal() {
        let h = Matrix::from_diag(2, 2, &[0.25, 4.0]);
        let g = Matrix::from_diag(2, 2, &[4.0, 0.25]);
        let ext = build_time_extension(&[h.clone(), g.clone(), h.clone()], 9).unwrap();
        assert_eq!(ext.truncated_rows, 8);
        assert_eq!(ext.extended[0].shape(), (18, 18));
        assert_eq!(ext.extended[1].submatrix(4, 6, 4, 6), g);
        assert!(matches!(
            build_time_extension(&[h.clone(), g.clone(), h], 1),
            Err(Error::TooFewBlocks {
                blocks: 1,
                required: 2
            })
        ));
    }
}
