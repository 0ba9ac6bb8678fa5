//! Two-way relay channel: two terminals exchange messages through a relay.
//! In the MAC phase both transmit to the relay; in the broadcast phase the
//! relay sends one common message back, at rate at most `c_common`.
//!
//! All rates are the symmetric rate `R` of each terminal's message.

use alloc::vec::Vec;

use crate::linalg::{log2_det_spd, validate_proper, Matrix, ProperChannel};
use crate::math::FloatExt;
use crate::rates::{waterfill_capacity, PowerKind, PowerSet};
use crate::{tol, Error, Result};

/// Cut-set bound of the scalar two-way relay channel with unit gains:
/// `min{½log₂(1 + p), c_common}`.
pub fn cut_set_scalar(p: f64, c_common: f64) -> f64 {
    (0.5 * (1.0 + p).log2()).min(c_common)
}

/// Rate of physical-layer network coding over the scalar channel:
/// `min{[½log₂(½ + p)]⁺, c_common}`.
pub fn pnc_scalar(p: f64, c_common: f64) -> f64 {
    (0.5 * (0.5 + p).log2()).max(0.0).min(c_common)
}

/// A two-way relay instance with symmetric power budget `power` at both
/// terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct TwrcScenario {
    h1: Matrix,
    h2: Matrix,
    power: f64,
    kind: PowerKind,
    c_common: f64,
}

impl TwrcScenario {
    /// Validates both MAC-phase channels as proper with a shared receive
    /// dimension. `c_common` may be infinite.
    pub fn new(h1: Matrix, h2: Matrix, power: f64, kind: PowerKind, c_common: f64) -> Result<Self> {
        if h1.rows() != h2.rows() {
            return Err(Error::DimensionMismatch {
                what: "receive dimension",
                expected: h1.rows(),
                found: h2.rows(),
            });
        }
        for h in [&h1, &h2] {
            let report = validate_proper(h, tol::PROPER)?;
            if !report.is_proper() {
                return Err(Error::NotProper(report));
            }
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidArgument("power must be positive and finite"));
        }
        if c_common.is_nan() || c_common < 0.0 {
            return Err(Error::InvalidArgument(
                "common-message capacity must be nonnegative",
            ));
        }
        Ok(Self {
            h1,
            h2,
            power,
            kind,
            c_common,
        })
    }

    /// Same scenario at another power level.
    pub fn with_power(&self, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidArgument("power must be positive and finite"));
        }
        Ok(Self {
            power,
            ..self.clone()
        })
    }

    pub fn h1(&self) -> &Matrix {
        &self.h1
    }

    pub fn h2(&self) -> &Matrix {
        &self.h2
    }

    /// The power parameter as given (per antenna for [`PowerKind::PerAntenna`]).
    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn kind(&self) -> PowerKind {
        self.kind
    }

    pub fn c_common(&self) -> f64 {
        self.c_common
    }

    pub fn n_r(&self) -> usize {
        self.h1.rows()
    }

    pub fn powers(&self) -> PowerSet {
        let result = match self.kind {
            PowerKind::Total => PowerSet::total(alloc::vec![self.power; 2]),
            PowerKind::PerAntenna => PowerSet::per_antenna(
                alloc::vec![self.power; 2],
                alloc::vec![self.h1.cols(), self.h2.cols()],
            ),
        };
        result.expect("validated at construction")
    }

    /// Both channels with their resolved total power budgets.
    pub fn channels(&self) -> [ProperChannel; 2] {
        let totals = self.powers().totals();
        [
            ProperChannel::with_power(self.h1.clone(), totals[0]),
            ProperChannel::with_power(self.h2.clone(), totals[1]),
        ]
        .map(|c| c.expect("validated at construction"))
    }
}

/// MIMO cut-set bound `min{C₁, C₂, c_common}` with water-filling
/// individual capacities.
pub fn cut_set_mimo(s: &TwrcScenario) -> Result<f64> {
    let mut best = s.c_common;
    for c in &s.channels() {
        best = best.min(waterfill_capacity(c)?.capacity);
    }
    Ok(best)
}

/// Rate of the joint-triangularization PNC scheme:
/// `min{[(N_r/2)·log₂(P/N_r)]⁺, c_common}` with `P` the smaller resolved
/// total power.
pub fn pnc_mimo(s: &TwrcScenario) -> f64 {
    let n = s.n_r() as f64;
    let p = s.powers().min_total();
    (0.5 * n * (p / n).log2()).max(0.0).min(s.c_common)
}

/// Decode-and-forward baseline: the relay decodes both messages, so the
/// symmetric rate is limited by half the MAC sum capacity and by each
/// individual rate, all with white inputs at full power.
pub fn df_symmetric_rate(s: &TwrcScenario) -> Result<f64> {
    let totals = s.powers().totals();
    let n_r = s.n_r();
    let mut sum = Matrix::identity(n_r);
    let mut best = s.c_common;
    for (h, p) in [&s.h1, &s.h2].into_iter().zip(&totals) {
        let gram = h.matmul(&h.transpose()).scale(p / h.cols() as f64);
        let single = &Matrix::identity(n_r) + &gram;
        best = best.min(0.5 * log2_det_spd(&single)?);
        sum = &sum + &gram;
    }
    Ok(best.min(0.25 * log2_det_spd(&sum)?))
}

/// Scalar PNC run separately on each parallel subchannel of diagonal
/// channels, with each antenna's power fixed to an equal share:
/// `min{Σ_i [½log₂(½ + min_k P_{k,i}·h_{k;ii}²)]⁺, c_common}`.
pub fn per_element_pnc(s: &TwrcScenario) -> Result<f64> {
    for (index, h) in [&s.h1, &s.h2].into_iter().enumerate() {
        if !h.is_diagonal() {
            return Err(Error::NotDiagonal { index: index + 1 });
        }
    }
    let totals = s.powers().totals();
    let per_antenna = [
        totals[0] / s.h1.cols() as f64,
        totals[1] / s.h2.cols() as f64,
    ];
    let rate: f64 = (0..s.n_r())
        .map(|i| {
            let a = per_antenna[0] * s.h1[(i, i)] * s.h1[(i, i)];
            let b = per_antenna[1] * s.h2[(i, i)] * s.h2[(i, i)];
            (0.5 * (0.5 + a.min(b)).log2()).max(0.0)
        })
        .sum();
    Ok(rate.min(s.c_common))
}

/// One point of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// The scenario's power parameter at this point.
    pub power: f64,
    pub cut_set_mimo: f64,
    pub pnc_mimo: f64,
    pub df_symmetric: f64,
    /// Absent when the channels are not diagonal.
    pub per_element_pnc: Option<f64>,
}

/// Evaluates every rate of `s` at each power of `grid`, in grid order.
pub fn sweep(s: &TwrcScenario, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.iter().any(|p| !p.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "power grid must be strictly ascending",
        ));
    }
    let diagonal = s.h1.is_diagonal() && s.h2.is_diagonal();
    grid.iter()
        .map(|&p| {
            let at = s.with_power(p)?;
            Ok(SweepRow {
                power: p,
                cut_set_mimo: cut_set_mimo(&at)?,
                pnc_mimo: pnc_mimo(&at),
                df_symmetric: df_symmetric_rate(&at)?,
                per_element_pnc: if diagonal {
                    Some(per_element_pnc(&at)?)
                } else {
                    None
                },
            })
        })
        .collect()
}

/// `points` values from `min` to `max`, equally spaced in `log₂`, with both
/// endpoints exact. Integer powers of two stay exact when both endpoints
/// are powers of two.
pub fn geometric_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max.is_finite() && min < max) {
        return Err(Error::InvalidArgument("grid needs 0 < min < max < inf"));
    }
    if points < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points"));
    }
    let (lo, hi) = (min.log2(), max.log2());
    let last = points - 1;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == last => max,
            i => libm::exp2(lo + (hi - lo) * i as f64 / last as f64),
        })
        .collect())
}
