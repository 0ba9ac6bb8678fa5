//! Capacities and achievable rates of the dirty MIMO channels, in bits per
//! real channel use.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::decomp::{jet_shared_left, required_blocks, truncated_blocks};
use crate::linalg::{qr_lower, svd, Matrix, ProperChannel};
use crate::math::FloatExt;
use crate::{tol, Error, Result};

/// How the numbers in a [`PowerSet`] constrain each transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    /// `P_k` bounds the total average power of transmitter `k`.
    Total,
    /// `P_k` bounds the average power of every antenna of transmitter `k`,
    /// which amounts to a total of `N_{t;k}·P_k`.
    PerAntenna,
}

/// Per-user power budgets `P_k` on a linear scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSet {
    powers: Vec<f64>,
    kind: PowerKind,
    antennas: Vec<usize>,
}

impl PowerSet {
    /// Total-power budgets.
    pub fn total(powers: Vec<f64>) -> Result<Self> {
        check_powers(&powers)?;
        let antennas = alloc::vec![1; powers.len()];
        Ok(Self {
            powers,
            kind: PowerKind::Total,
            antennas,
        })
    }

    /// Per-antenna budgets for transmitters with the given antenna counts.
    pub fn per_antenna(powers: Vec<f64>, antennas: Vec<usize>) -> Result<Self> {
        check_powers(&powers)?;
        if antennas.len() != powers.len() {
            return Err(Error::LengthMismatch {
                expected: powers.len(),
                found: antennas.len(),
            });
        }
        if antennas.contains(&0) {
            return Err(Error::InvalidArgument("antenna counts must be positive"));
        }
        Ok(Self {
            powers,
            kind: PowerKind::PerAntenna,
            antennas,
        })
    }

    pub fn kind(&self) -> PowerKind {
        self.kind
    }

    /// The budgets as given.
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Number of users `K`.
    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// Total power of every user after resolving the constraint kind.
    pub fn totals(&self) -> Vec<f64> {
        match self.kind {
            PowerKind::Total => self.powers.clone(),
            PowerKind::PerAntenna => self
                .powers
                .iter()
                .zip(&self.antennas)
                .map(|(p, &n)| p * n as f64)
                .collect(),
        }
    }

    /// `min_k` of the resolved totals.
    pub fn min_total(&self) -> f64 {
        self.totals().into_iter().fold(f64::INFINITY, f64::min)
    }
}

fn check_powers(powers: &[f64]) -> Result<()> {
    if powers.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one power budget is needed",
        ));
    }
    if powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidArgument("powers must be positive and finite"));
    }
    Ok(())
}

/// Labeled rates plus the quantities they were computed from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateSummary {
    /// `(label, bits)` in a fixed order.
    pub entries: Vec<(String, f64)>,
    /// `(label, value)` pairs such as SNRs, diagonal entries and `Ñ/N`.
    pub metadata: Vec<(String, f64)>,
}

impl RateSummary {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, v)| v)
    }

    pub fn meta(&self, label: &str) -> Option<f64> {
        self.metadata
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, v)| v)
    }

    fn push(&mut self, label: &str, value: f64) {
        self.entries.push((label.to_string(), value));
    }

    fn note(&mut self, label: String, value: f64) {
        self.metadata.push((label, value));
    }
}

/// Water-filling solution for one channel under a total power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFilling {
    /// `½·log₂|I + H·K·Hᵀ|`.
    pub capacity: f64,
    /// The optimal `N_t × N_t` input covariance `K`.
    pub covariance: Matrix,
    /// Eigenmode gains `σ_i²`, descending.
    pub gains: Vec<f64>,
    /// Power poured into each eigenmode.
    pub mode_powers: Vec<f64>,
    /// Water level `μ`: `p_i = (μ − 1/σ_i²)⁺`.
    pub level: f64,
}

impl WaterFilling {
    /// Largest violation of the KKT conditions relative to the water level:
    /// `p_i + 1/σ_i² = μ` on active modes, `1/σ_i² ≥ μ` on inactive ones.
    pub fn kkt_residual(&self) -> f64 {
        self.gains
            .iter()
            .zip(&self.mode_powers)
            .map(|(&g, &p)| {
                let floor = 1.0 / g;
                if p > 0.0 {
                    (p + floor - self.level).abs()
                } else {
                    (self.level - floor).max(0.0)
                }
            })
            .fold(0.0, f64::max)
            / self.level
    }
}

/// Capacity of the MIMO channel `y = H·x + z` without interference, which
/// dirty-paper coding attains despite known interference.
///
/// The water level is found by bisection until the poured power is within
/// `1e-10·P` of the budget, then fixed exactly on the resulting active set.
pub fn waterfill_capacity(h: &ProperChannel) -> Result<WaterFilling> {
    let s = svd(h.matrix())?;
    let power = h.power();
    let gains: Vec<f64> = s.sigma.iter().map(|x| x * x).filter(|&g| g > 0.0).collect();
    let poured = |level: f64| {
        gains
            .iter()
            .map(|g| (level - 1.0 / g).max(0.0))
            .sum::<f64>()
    };

    let (mut lo, mut hi) = (
        0.0,
        power + gains.iter().map(|g| 1.0 / g).fold(0.0, f64::max),
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p = poured(mid);
        if (p - power).abs() <= 1e-10 * power {
            lo = mid;
            hi = mid;
            break;
        }
        if p > power {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let approx = 0.5 * (lo + hi);
    let active: Vec<bool> = gains.iter().map(|g| approx > 1.0 / g).collect();
    let count = active.iter().filter(|&&a| a).count().max(1);
    let floors: f64 = gains
        .iter()
        .zip(&active)
        .filter(|(_, &a)| a)
        .map(|(g, _)| 1.0 / g)
        .sum();
    let exact = (power + floors) / count as f64;
    let consistent = gains
        .iter()
        .zip(&active)
        .all(|(g, &a)| a == (exact > 1.0 / g) || (exact - 1.0 / g).abs() <= 1e-12 * exact);
    let level = if consistent { exact } else { approx };

    let mode_powers: Vec<f64> = gains.iter().map(|g| (level - 1.0 / g).max(0.0)).collect();
    let capacity = gains
        .iter()
        .zip(&mode_powers)
        .map(|(g, p)| 0.5 * (1.0 + g * p).log2())
        .sum();

    let n_t = h.n_t();
    let mut covariance = Matrix::zeros(n_t, n_t);
    for (m, &p) in mode_powers.iter().enumerate() {
        for i in 0..n_t {
            for j in 0..n_t {
                covariance[(i, j)] += p * s.v[(i, m)] * s.v[(j, m)];
            }
        }
    }
    Ok(WaterFilling {
        capacity,
        covariance,
        gains,
        mode_powers,
        level,
    })
}

/// `R_HSNR = (N_r/2)·log₂(P/N_r)`, unclamped.
pub fn high_snr_rate(n_r: usize, p: f64) -> f64 {
    let n = n_r as f64;
    0.5 * n * (p / n).log2()
}

fn check_unit_product(diag: &[f64], n_r: usize) -> Result<()> {
    if diag.len() != n_r {
        return Err(Error::LengthMismatch {
            expected: n_r,
            found: diag.len(),
        });
    }
    let product: f64 = diag.iter().product();
    if (product.abs() - 1.0).abs() > tol::UNIT_PRODUCT {
        return Err(Error::DiagProductNotUnit { product });
    }
    Ok(())
}

/// Rate of the zero-forcing dirty-paper scheme over the subchannels of a
/// triangularization with diagonal `diag`: `Σ ½·log₂(1 + (P/N_r)·d_i²)`.
pub fn zf_dpc_rate(diag: &[f64], n_r: usize, p: f64) -> Result<f64> {
    check_unit_product(diag, n_r)?;
    let snr = p / n_r as f64;
    Ok(diag.iter().map(|d| 0.5 * (1.0 + snr * d * d).log2()).sum())
}

/// Symmetric-rate bounds of the scalar dirty MAC with unit gains.
///
/// Entries: `outer = ½log₂(1 + min P_k)`, `inner = ½[log₂(1/K + min P_k)]⁺`
/// and `high_snr = ½log₂(min P_k)` (unclamped).
pub fn scalar_dmac_bounds(powers: &PowerSet) -> Result<RateSummary> {
    let k = powers.len();
    if k < 2 {
        return Err(Error::InvalidArgument(
            "the dirty MAC needs at least two users",
        ));
    }
    let p = powers.min_total();
    let mut out = RateSummary::default();
    out.push("outer", 0.5 * (1.0 + p).log2());
    out.push("inner", 0.5 * (1.0 / k as f64 + p).log2().max(0.0));
    out.push("high_snr", 0.5 * p.log2());
    out.note("min_power".into(), p);
    out.note("users".into(), k as f64);
    Ok(out)
}

fn common_rows(channels: &[ProperChannel]) -> Result<usize> {
    let first = channels
        .first()
        .ok_or(Error::InvalidArgument("at least one channel is needed"))?;
    let n_r = first.n_r();
    for c in channels {
        if c.n_r() != n_r {
            return Err(Error::DimensionMismatch {
                what: "receive dimension",
                expected: n_r,
                found: c.n_r(),
            });
        }
    }
    Ok(n_r)
}

/// High-SNR sum rate when every user triangularizes its own channel
/// (`H_k = T_k·Q_kᵀ`) without a joint decomposition:
/// `Σ_i ½·log₂(min_k P_k·d_{k;i}² / N_r)`.
///
/// The entry is `bottleneck`; metadata holds the per-index minima
/// `min_k P_k·d_{k;i}²` as `min_gain_power_{i}`.
pub fn qrd_bottleneck_rate(channels: &[ProperChannel]) -> Result<RateSummary> {
    let n_r = common_rows(channels)?;
    let mut minima = alloc::vec![f64::INFINITY; n_r];
    for c in channels {
        let d = qr_lower(c.matrix())?.t.diagonal();
        for (m, di) in minima.iter_mut().zip(&d) {
            *m = m.min(c.power() * di * di);
        }
    }
    let rate = minima.iter().map(|m| 0.5 * (m / n_r as f64).log2()).sum();
    let mut out = RateSummary::default();
    out.push("bottleneck", rate);
    for (i, m) in minima.iter().enumerate() {
        out.note(format!("min_gain_power_{}", i + 1), *m);
    }
    Ok(out)
}

/// Sum-rate outer bound: the smallest individual water-filling capacity.
pub fn dmac_outer(channels: &[ProperChannel]) -> Result<f64> {
    if channels.len() < 2 {
        return Err(Error::InvalidArgument(
            "the dirty MAC needs at least two users",
        ));
    }
    common_rows(channels)?;
    let mut best = f64::INFINITY;
    for c in channels {
        best = best.min(waterfill_capacity(c)?.capacity);
    }
    Ok(best)
}

/// High-SNR achievable sum rate `(N_r/2)·[log₂(min P_k/N_r)]⁺`.
///
/// With three or more users the time extension over `n_blocks` channel
/// uses is required, and the rate is scaled by `Ñ/N`.
pub fn dmac_inner_high_snr(n_r: usize, powers: &PowerSet, n_blocks: Option<usize>) -> Result<f64> {
    let k = powers.len();
    if n_r == 0 || k < 2 {
        return Err(Error::InvalidArgument(
            "need N_r >= 1 and at least two users",
        ));
    }
    let n = n_r as f64;
    let base = 0.5 * n * (powers.min_total() / n).log2().max(0.0);
    if k == 2 {
        return Ok(base);
    }
    let Some(blocks) = n_blocks else {
        return Err(Error::TooFewBlocks {
            blocks: 0,
            required: required_blocks(n_r, k).unwrap_or(usize::MAX),
        });
    };
    let kept = truncated_blocks(n_r, k, blocks)?;
    Ok(base * kept as f64 / blocks as f64)
}

/// Finite-SNR achievable sum rate over the subchannels of a joint
/// triangularization with common diagonal `diag`:
/// `Σ_i ½·[log₂(1/K + d_i²·min P_k/N_r)]⁺`.
pub fn dmac_inner_finite_snr(diag: &[f64], powers: &PowerSet) -> Result<f64> {
    let k = powers.len();
    if k < 2 {
        return Err(Error::InvalidArgument(
            "the dirty MAC needs at least two users",
        ));
    }
    check_unit_product(diag, diag.len())?;
    let snr = powers.min_total() / diag.len() as f64;
    Ok(diag
        .iter()
        .map(|d| 0.5 * (1.0 / k as f64 + d * d * snr).log2().max(0.0))
        .sum())
}

/// Outer bound, inner bounds and their gaps for one instance.
///
/// Entries: `outer`, `inner_high_snr`, `gap_high_snr`, and for two users
/// also `inner_finite_snr` and `gap_finite_snr`, computed on the diagonal
/// of [`jet_shared_left`]. Metadata: `snr_{k}` (`P_k/N_r`), `diag_{i}` and
/// `efficiency` (`Ñ/N`, 1 for two users).
pub fn gap_report(channels: &[ProperChannel], n_blocks: Option<usize>) -> Result<RateSummary> {
    let n_r = common_rows(channels)?;
    let powers = PowerSet::total(channels.iter().map(|c| c.power()).collect())?;
    let outer = dmac_outer(channels)?;
    let inner = dmac_inner_high_snr(n_r, &powers, n_blocks)?;

    let mut out = RateSummary::default();
    out.push("outer", outer);
    out.push("inner_high_snr", inner);
    out.push("gap_high_snr", outer - inner);
    for (k, p) in powers.powers().iter().enumerate() {
        out.note(format!("snr_{}", k + 1), p / n_r as f64);
    }
    if channels.len() == 2 {
        let jt = jet_shared_left(channels[0].matrix(), channels[1].matrix())?;
        let finite = dmac_inner_finite_snr(&jt.diag, &powers)?;
        out.push("inner_finite_snr", finite);
        out.push("gap_finite_snr", outer - finite);
        for (i, d) in jt.diag.iter().enumerate() {
            out.note(format!("diag_{}", i + 1), *d);
        }
        out.note("efficiency".into(), 1.0);
    } else {
        let blocks = n_blocks.unwrap_or(1);
        let kept = truncated_blocks(n_r, channels.len(), blocks)?;
        out.note("efficiency".into(), kept as f64 / blocks as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn waterfill_identity() {
        let h = ProperChannel::with_power(Matrix::identity(2), 2.0).unwrap();
        let w = waterfill_capacity(&h).unwrap();
        assert!(close(w.capacity, 1.0, 1e-12));
        assert!(w.covariance.relative_error(&Matrix::identity(2)) < 1e-12);
        assert!(w.kkt_residual() < 1e-12);
    }

    #[test]
    fn waterfill_drops_weak_mode_at_low_power() {
        let h = ProperChannel::with_power(Matrix::from_diag(2, 2, &[4.0, 0.25]), 1.0).unwrap();
        let w = waterfill_capacity(&h).unwrap();
        assert_eq!(w.mode_powers[1], 0.0);
        assert!(close(w.mode_powers[0], 1.0, 1e-12));
        assert!(close(w.capacity, 0.5 * 17f64.log2(), 1e-12));
        assert!(w.kkt_residual() < 1e-8);
    }

    #[test]
    fn high_snr_examples() {
        assert_eq!(high_snr_rate(2, 8.0), 2.0);
        assert_eq!(high_snr_rate(1, 1.0), 0.0);
        assert_eq!(high_snr_rate(4, 4.0), 0.0);
    }

    #[test]
    fn zf_dpc_examples() {
        assert!(close(
            zf_dpc_rate(&[1.0, 1.0], 2, 8.0).unwrap(),
            5f64.log2(),
            1e-12
        ));
        let r = zf_dpc_rate(&[2.0, 0.5], 2, 8.0).unwrap();
        assert!(close(r, 0.5 * 17f64.log2() + 0.5, 1e-12));
        assert!(matches!(
            zf_dpc_rate(&[2.0, 2.0], 2, 8.0),
            Err(Error::DiagProductNotUnit { .. })
        ));
    }

    #[test]
    fn scalar_bounds_examples() {
        let s = scalar_dmac_bounds(&PowerSet::total(alloc::vec![15.0, 100.0]).unwrap()).unwrap();
        assert!(close(s.get("outer").unwrap(), 2.0, 1e-12));
        assert!(close(s.get("inner").unwrap(), 0.5 * 15.5f64.log2(), 1e-12));
        let s = scalar_dmac_bounds(&PowerSet::total(alloc::vec![0.4, 0.4]).unwrap()).unwrap();
        assert_eq!(s.get("inner").unwrap(), 0.0);
        let s = scalar_dmac_bounds(&PowerSet::total(alloc::vec![63.0; 3]).unwrap()).unwrap();
        assert!(close(
            s.get("inner").unwrap(),
            0.5 * (63.0f64 + 1.0 / 3.0).log2(),
            1e-12
        ));
        assert!(close(s.get("outer").unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn bottleneck_on_mirrored_triangles() {
        let h1 = Matrix::from_rows(&[[2.0, 0.0], [1.0, 0.5]]);
        let h2 = Matrix::from_rows(&[[0.5, 0.0], [-3.0, 2.0]]);
        let ch = [
            ProperChannel::with_power(h1, 32.0).unwrap(),
            ProperChannel::with_power(h2, 32.0).unwrap(),
        ];
        let s = qrd_bottleneck_rate(&ch).unwrap();
        assert!(close(s.get("bottleneck").unwrap(), 2.0, 1e-12));
        assert!(close(s.meta("min_gain_power_1").unwrap(), 8.0, 1e-12));
    }

    #[test]
    fn inner_high_snr_examples() {
        let two = PowerSet::total(alloc::vec![32.0, 100.0]).unwrap();
        assert!(close(
            dmac_inner_high_snr(2, &two, None).unwrap(),
            4.0,
            1e-12
        ));
        let three = PowerSet::total(alloc::vec![32.0; 3]).unwrap();
        assert_eq!(
            dmac_inner_high_snr(2, &three, Some(9)).unwrap(),
            4.0 * 8.0 / 9.0
        );
        assert!(matches!(
            dmac_inner_high_snr(2, &three, None),
            Err(Error::TooFewBlocks {
                blocks: 0,
                required: 2
            })
        ));
        assert!(matches!(
            dmac_inner_high_snr(3, &PowerSet::total(alloc::vec![32.0; 4]).unwrap(), Some(8)),
            Err(Error::TooFewBlocks {
                blocks: 8,
                required: 9
            })
        ));
        let low = PowerSet::total(alloc::vec![2.0, 2.0]).unwrap();
        assert_eq!(dmac_inner_high_snr(2, &low, None).unwrap(), 0.0);
    }

    #[test]
    fn inner_finite_snr_examples() {
        let p = PowerSet::total(alloc::vec![32.0, 32.0]).unwrap();
        let r = dmac_inner_finite_snr(&[1.0, 1.0], &p).unwrap();
        assert!(close(r, 16.5f64.log2(), 1e-12));
        let low = PowerSet::total(alloc::vec![0.5, 0.5]).unwrap();
        assert_eq!(dmac_inner_finite_snr(&[1.0, 1.0], &low).unwrap(), 0.0);
    }

    #[test]
    fn per_antenna_totals() {
        let p = PowerSet::per_antenna(alloc::vec![8.0, 8.0], alloc::vec![2, 3]).unwrap();
        assert_eq!(p.totals(), alloc::vec![16.0, 24.0]);
        assert_eq!(p.min_total(), 16.0);
        assert!(PowerSet::total(alloc::vec![0.0]).is_err());
    }
}
