//! Orthogonal triangularizations: the single-matrix GTD family (SVD, QR,
//! GMD), the joint equi-diagonal triangularization of two matrices, the
//! time-extension construction for more users, and a verifier for joint
//! factorizations.

mod extension;
mod gmd;
mod gtd;
mod jet;
mod verify;

pub use extension::{
    build_time_extension, extension_efficiency, required_blocks, truncated_blocks, TimeExtension,
};
pub use gmd::gmd;
pub use gtd::{gtd_feasible, qr_gtd, svd_gtd, GtdCheck, GtdResult};
pub use jet::{
    jet_shared_left, jet_shared_right, JointFactor, JointTriangularization, Orientation,
};
pub use verify::{verify_joint_triangularization, FactorCheck, JointReport, Tolerances};
