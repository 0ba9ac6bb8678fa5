//! Matrix triangularizations and rate formulas for the dirty MIMO
//! multiple-access channel, with a modulo-lattice simulation of the
//! transmission schemes built on top of them.
//!
//! The crate is `no_std` and only needs an allocator. Everything is real
//! valued; logarithms are base 2, so every rate is in bits per real channel
//! use.
//!
//! * [`linalg`]: dense matrices, Householder QR, Jacobi SVD, proper-matrix
//!   validation and normalization.
//! * [`decomp`]: GMD, GTD feasibility, joint equi-diagonal triangularization
//!   (JET) in both orientations, time extension and a verifier.
//! * [`rates`]: water-filling capacity and the DMAC inner/outer bounds.
//! * [`twrc`]: two-way relay cut-set, PNC and decode-and-forward rates.
//! * [`sim`]: seeded Monte Carlo realization of the ZF dirty-paper schemes.
#![no_std]
// when std is anywhere in the build graph (tests, dev-dependency features)
// its inherent float methods shadow `math::FloatExt`
#![allow(unused_imports)]

extern crate alloc;

mod error;
mod math;

pub mod decomp;
pub mod linalg;
pub mod rates;
pub mod sim;
pub mod twrc;

pub use error::{Error, Result};
pub use linalg::{Matrix, ProperChannel};

/// Default numerical tolerances shared by the decompositions and verifier.
pub mod tol {
    /// `‖QᵀQ − I‖_max` bound for orthogonal factors.
    pub const ORTHONORMALITY: f64 = 1e-9;
    /// Relative Frobenius reconstruction bound.
    pub const RECONSTRUCTION: f64 = 1e-8;
    /// Largest magnitude tolerated above the diagonal of a triangular factor.
    pub const TRIANGULARITY: f64 = 1e-10;
    /// Largest disparity tolerated between supposedly equal diagonals.
    pub const DIAGONAL: f64 = 1e-8;
    /// Singular values below this fraction of the largest count as zero.
    pub const RANK: f64 = 1e-10;
    /// `|det(H·Hᵀ) − 1|` bound for a proper matrix.
    pub const PROPER: f64 = 1e-8;
    /// `|∏ dᵢ − 1|` bound for a unit-product diagonal.
    pub const UNIT_PRODUCT: f64 = 1e-6;
}
