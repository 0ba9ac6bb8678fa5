use crate::math::FloatExt;
use crate::{Error, Result};

/// Whether transmitter and receiver share a uniform dither on each
/// subchannel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dither {
    None,
    /// Uniform over the modulo interval, drawn from the run's seed.
    UniformSeeded,
}

/// Scalar modulo-lattice code used on every subchannel: `levels` points
/// `c_m = m·δ` (reduced) in the interval `[−w, w)`, with `δ = 2w/levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    /// Interval half-width `w`. `None` picks `√(P/N_r)` from the smallest
    /// budget, which bounds every transmitted entry by `√(P/N_r)` so the
    /// power constraint holds on every channel use.
    pub halfwidth: Option<f64>,
    pub levels: u32,
    pub dither: Dither,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            halfwidth: None,
            levels: 4,
            dither: Dither::UniformSeeded,
        }
    }
}

/// A resolved modulo interval with its constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ModLattice {
    pub halfwidth: f64,
    pub levels: u32,
}

impl ModLattice {
    pub fn new(config: &LatticeConfig, min_power: f64, n_r: usize) -> Result<Self> {
        let halfwidth = config
            .halfwidth
            .unwrap_or_else(|| (min_power / n_r as f64).sqrt());
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(Error::InvalidArgument(
                "lattice half-width must be positive and finite",
            ));
        }
        if config.levels < 2 {
            return Err(Error::InvalidArgument("lattice needs at least two levels"));
        }
        Ok(Self {
            halfwidth,
            levels: config.levels,
        })
    }

    /// Spacing `δ` between constellation points.
    pub fn step(&self) -> f64 {
        2.0 * self.halfwidth / self.levels as f64
    }

    /// Reduces `x` into `[−w, w)`.
    pub fn reduce(&self, x: f64) -> f64 {
        let width = 2.0 * self.halfwidth;
        let r = x - width * ((x + self.halfwidth) / width).floor();
        // rounding can land exactly on +w
        if r >= self.halfwidth {
            r - width
        } else {
            r
        }
    }

    pub fn point(&self, m: u32) -> f64 {
        self.reduce(m as f64 * self.step())
    }

    /// Nearest constellation index after modulo reduction.
    pub fn decide(&self, x: f64) -> u32 {
        let k = (self.reduce(x) / self.step()).round() as i64;
        k.rem_euclid(self.levels as i64) as u32
    }
}
