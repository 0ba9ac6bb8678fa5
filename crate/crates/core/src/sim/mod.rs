//! Monte Carlo realization of the zero-forcing dirty-paper schemes.
//!
//! Each subchannel carries uncoded symbols of a scalar modulo lattice.
//! Transmitters precancel, successively, the self-interference of their
//! triangular factor and their own known interference; the receiver
//! rotates by `Uᵀ`, divides by the diagonal gain, removes the dither and
//! picks the nearest lattice point. In the multi-user schemes it decides
//! the modulo sum of the users' symbols.
//!
//! Runs are deterministic in their seed, and every report states whether a
//! second run without interference produced bit-identical decisions.

mod engine;
mod interference;
mod lattice;

use alloc::vec::Vec;

use engine::{Outcome, Plan, UserPlan};
pub use interference::{Interference, InterferenceKind};
use lattice::ModLattice;
pub use lattice::{Dither, LatticeConfig};

use crate::decomp::{gmd, jet_shared_left};
use crate::linalg::ProperChannel;
use crate::math::FloatExt;
use crate::twrc::TwrcScenario;
use crate::{Error, Result};

/// Run length, seed and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub trials: u64,
    pub seed: u64,
    /// Standard deviation of the receiver noise; 1 is the channel model,
    /// 0 gives noiseless runs.
    pub noise_scale: f64,
}

impl SimParams {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            noise_scale: 1.0,
        }
    }

    pub fn noiseless(self) -> Self {
        Self {
            noise_scale: 0.0,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    SingleUserZfDpc,
    TwoUserDmac,
    TwrcPncMac,
}

/// Measurements on one subchannel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubchannelReport {
    /// Diagonal gain `d_i` of the triangularization.
    pub diag: f64,
    /// Least-squares gain from the summed transmitted symbols to the
    /// observation after removing the precancelled interference.
    pub gain: f64,
    pub gain_std_error: f64,
    pub noise_variance: f64,
    pub symbol_errors: u64,
}

/// Terminal-side outcome of the two-way relay MAC phase: each terminal
/// subtracts its own symbol from the relay's modulo-sum decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminalReport {
    /// Wrong recoveries of the other terminal's symbol, per terminal.
    pub errors: [u64; 2],
    /// Subchannel uses where the relay decided correctly but a terminal
    /// still recovered the wrong symbol.
    pub implication_violations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub trials: u64,
    pub halfwidth: f64,
    pub levels: u32,
    pub subchannels: Vec<SubchannelReport>,
    /// Average `‖x_k‖²` per user.
    pub realized_power: Vec<f64>,
    pub power_budget: Vec<f64>,
    /// Decisions were bit-identical to a rerun without interference.
    pub interference_invariant: bool,
    /// Largest deviation of the noise-free observation from
    /// `d_i·x̃_i + (precancelled interference)`.
    pub residual_self_interference: f64,
    /// Largest magnitude among those observations, for scaling the residual.
    pub signal_scale: f64,
    /// FNV-1a hash of all decisions in trial order.
    pub decision_digest: u64,
    pub terminal: Option<TerminalReport>,
}

impl SimReport {
    pub fn total_errors(&self) -> u64 {
        self.subchannels.iter().map(|s| s.symbol_errors).sum()
    }
}

/// Single-user zero-forcing MIMO dirty-paper coding over the GMD of `h`.
pub fn run_single_user_zf_dpc(
    h: &ProperChannel,
    interference: Interference,
    lattice: &LatticeConfig,
    params: &SimParams,
) -> Result<SimReport> {
    let g = gmd(h.matrix())?;
    let plan = Plan {
        u: g.u,
        diag: g.diag,
        users: alloc::vec![UserPlan {
            h: h.matrix().clone(),
            t: g.t,
            v: g.v,
            interference,
        }],
        lattice: ModLattice::new(lattice, h.power(), h.n_r())?,
        dither: lattice.dither,
        terminal_recovery: false,
    };
    execute(Scheme::SingleUserZfDpc, &plan, &[h.power()], params)
}

/// Two-user dirty MAC over the shared-left joint triangularization; the
/// receiver decodes the modulo sum of the two users' symbols.
pub fn run_two_user_dmac(
    h1: &ProperChannel,
    h2: &ProperChannel,
    interferences: [Interference; 2],
    lattice: &LatticeConfig,
    params: &SimParams,
) -> Result<SimReport> {
    let plan = two_user_plan(h1, h2, interferences, lattice, false)?;
    execute(
        Scheme::TwoUserDmac,
        &plan,
        &[h1.power(), h2.power()],
        params,
    )
}

/// MAC phase of the two-way relay channel with physical-layer network
/// coding: both terminals use the same lattice, the relay decodes the
/// modulo sum and each terminal recovers the other's symbol from it.
pub fn run_twrc_pnc_mac_phase(
    s: &TwrcScenario,
    interferences: [Interference; 2],
    lattice: &LatticeConfig,
    params: &SimParams,
) -> Result<SimReport> {
    let [h1, h2] = s.channels();
    let plan = two_user_plan(&h1, &h2, interferences, lattice, true)?;
    execute(Scheme::TwrcPncMac, &plan, &[h1.power(), h2.power()], params)
}

fn two_user_plan(
    h1: &ProperChannel,
    h2: &ProperChannel,
    interferences: [Interference; 2],
    lattice: &LatticeConfig,
    terminal_recovery: bool,
) -> Result<Plan> {
    let jt = jet_shared_left(h1.matrix(), h2.matrix())?;
    let users = jt
        .per_matrix
        .into_iter()
        .zip([h1, h2])
        .zip(interferences)
        .map(|((f, h), interference)| UserPlan {
            h: h.matrix().clone(),
            t: f.triangular,
            v: f.orthogonal,
            interference,
        })
        .collect();
    Ok(Plan {
        u: jt.shared,
        diag: jt.diag,
        users,
        lattice: ModLattice::new(lattice, h1.power().min(h2.power()), h1.n_r())?,
        dither: lattice.dither,
        terminal_recovery,
    })
}

fn execute(scheme: Scheme, plan: &Plan, budgets: &[f64], params: &SimParams) -> Result<SimReport> {
    if params.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed"));
    }
    if !(params.noise_scale >= 0.0 && params.noise_scale.is_finite()) {
        return Err(Error::InvalidArgument(
            "noise scale must be nonnegative and finite",
        ));
    }
    let out = engine::run(plan, params.trials, params.seed, params.noise_scale, true);

    let trials = params.trials as f64;
    let realized_power: Vec<f64> = out.energy.iter().map(|e| e / trials).collect();
    for (user, (&realized, &budget)) in realized_power.iter().zip(budgets).enumerate() {
        if realized > budget * (1.0 + 1e-6) {
            return Err(Error::PowerViolation {
                user: user + 1,
                realized,
                budget,
            });
        }
    }

    let interference_free = plan
        .users
        .iter()
        .all(|u| u.interference == Interference::ZERO || u.interference.amplitude == 0.0);
    let interference_invariant = interference_free
        || engine::run(plan, params.trials, params.seed, params.noise_scale, false).digest
            == out.digest;

    Ok(SimReport {
        scheme,
        seed: params.seed,
        trials: params.trials,
        halfwidth: plan.lattice.halfwidth,
        levels: plan.lattice.levels,
        subchannels: subchannel_reports(plan, &out, params.trials),
        realized_power,
        power_budget: budgets.to_vec(),
        interference_invariant,
        residual_self_interference: out.residual,
        signal_scale: out.scale,
        decision_digest: out.digest,
        terminal: plan.terminal_recovery.then_some(TerminalReport {
            errors: out.terminal_errors,
            implication_violations: out.implication_violations,
        }),
    })
}

fn subchannel_reports(plan: &Plan, out: &Outcome, trials: u64) -> Vec<SubchannelReport> {
    let dof = trials.saturating_sub(1).max(1) as f64;
    (0..plan.diag.len())
        .map(|i| {
            let (ab, bb, aa) = (out.sum_ab[i], out.sum_bb[i], out.sum_aa[i]);
            let gain = if bb > 0.0 { ab / bb } else { 0.0 };
            let noise_variance = ((aa - 2.0 * gain * ab + gain * gain * bb) / dof).max(0.0);
            let gain_std_error = if bb > 0.0 {
                (noise_variance / bb).sqrt()
            } else {
                f64::INFINITY
            };
            SubchannelReport {
                diag: plan.diag[i],
                gain,
                gain_std_error,
                noise_variance,
                symbol_errors: out.errors[i],
            }
        })
        .collect()
}
