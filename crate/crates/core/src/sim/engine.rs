use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::interference::Interference;
use super::lattice::{Dither, ModLattice};
use crate::linalg::Matrix;

pub(crate) struct UserPlan {
    pub h: Matrix,
    pub t: Matrix,
    pub v: Matrix,
    pub interference: Interference,
}

/// Everything fixed offline: the receiver rotation `U`, each user's
/// factors and the shared lattice.
pub(crate) struct Plan {
    pub u: Matrix,
    pub diag: Vec<f64>,
    pub users: Vec<UserPlan>,
    pub lattice: ModLattice,
    pub dither: Dither,
    pub terminal_recovery: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Outcome {
    pub sum_ab: Vec<f64>,
    pub sum_bb: Vec<f64>,
    pub sum_aa: Vec<f64>,
    pub errors: Vec<u64>,
    pub energy: Vec<f64>,
    pub residual: f64,
    pub scale: f64,
    pub digest: u64,
    pub terminal_errors: [u64; 2],
    pub implication_violations: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv(hash: u64, word: u32) -> u64 {
    word.to_le_bytes()
        .iter()
        .fold(hash, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Runs `trials` channel uses. Trial `t` draws messages, dithers and noise
/// from stream `2t` of a ChaCha generator keyed by `seed`, and interference
/// from stream `2t + 1`, so the data path is independent of the
/// interference and of the trial order.
pub(crate) fn run(
    plan: &Plan,
    trials: u64,
    seed: u64,
    noise_scale: f64,
    with_interference: bool,
) -> Outcome {
    let n_r = plan.u.rows();
    let k_users = plan.users.len();
    let lattice = plan.lattice;
    let w = lattice.halfwidth;
    let base = ChaCha8Rng::seed_from_u64(seed);

    let mut out = Outcome {
        sum_ab: vec![0.0; n_r],
        sum_bb: vec![0.0; n_r],
        sum_aa: vec![0.0; n_r],
        errors: vec![0; n_r],
        energy: vec![0.0; k_users],
        digest: FNV_OFFSET,
        ..Outcome::default()
    };

    let mut messages = vec![vec![0u32; n_r]; k_users];
    let mut dithers = vec![vec![0.0; n_r]; k_users];
    let mut symbols = vec![vec![0.0; n_r]; k_users];
    let mut known = vec![vec![0.0; n_r]; k_users];
    let mut s = vec![0.0; n_r];
    let mut noise = vec![0.0; n_r];

    for trial in 0..trials {
        let mut rng = base.clone();
        rng.set_stream(2 * trial);
        let mut irng = base.clone();
        irng.set_stream(2 * trial + 1);

        for k in 0..k_users {
            for i in 0..n_r {
                messages[k][i] = rng.random_range(0..lattice.levels);
                dithers[k][i] = match plan.dither {
                    Dither::None => 0.0,
                    Dither::UniformSeeded => rng.random_range(-w..w),
                };
            }
        }
        for z in noise.iter_mut() {
            *z = noise_scale * rng.sample::<f64, _>(StandardNormal);
        }

        let mut y = noise.clone();
        for (k, user) in plan.users.iter().enumerate() {
            let interference = if with_interference {
                user.interference
            } else {
                Interference::ZERO
            };
            interference.fill(&mut irng, trial, &messages[k], &mut s);
            let rotated = plan.u.tr_mul_vec(&s);

            // successive precancellation of self and external interference
            for i in 0..n_r {
                let own: f64 = (0..i).map(|l| user.t[(i, l)] * symbols[k][l]).sum();
                let j = own + rotated[i];
                known[k][i] = j;
                let c = lattice.point(messages[k][i]);
                symbols[k][i] = lattice.reduce(c + dithers[k][i] - j / user.t[(i, i)]);
            }

            let mut padded = vec![0.0; user.v.rows()];
            padded[..n_r].copy_from_slice(&symbols[k]);
            let x = user.v.mul_vec(&padded);
            out.energy[k] += x.iter().map(|v| v * v).sum::<f64>();
            for (yi, (hx, si)) in y.iter_mut().zip(user.h.mul_vec(&x).iter().zip(&s)) {
                *yi += hx + si;
            }
        }

        let observed = plan.u.tr_mul_vec(&y);
        let rotated_noise = plan.u.tr_mul_vec(&noise);
        for i in 0..n_r {
            let dither: f64 = (0..k_users).map(|k| dithers[k][i]).sum();
            let decision = lattice.decide(observed[i] / plan.diag[i] - dither);
            let truth = ((0..k_users).map(|k| messages[k][i] as u64).sum::<u64>()
                % lattice.levels as u64) as u32;
            out.errors[i] += u64::from(decision != truth);
            out.digest = fnv(out.digest, decision);

            let cancelled: f64 = (0..k_users).map(|k| known[k][i]).sum();
            let signal: f64 = (0..k_users).map(|k| symbols[k][i]).sum();
            let a = observed[i] - cancelled;
            out.sum_ab[i] += a * signal;
            out.sum_bb[i] += signal * signal;
            out.sum_aa[i] += a * a;

            let clean = observed[i] - rotated_noise[i];
            let structured: f64 = (0..k_users)
                .map(|k| plan.users[k].t[(i, i)] * symbols[k][i] + known[k][i])
                .sum();
            out.residual = out.residual.max((clean - structured).abs());
            out.scale = out.scale.max(clean.abs()).max(cancelled.abs());

            if plan.terminal_recovery && k_users == 2 {
                let m = lattice.levels as i64;
                let (m1, m2) = (messages[0][i] as i64, messages[1][i] as i64);
                let at_one = (decision as i64 - m1).rem_euclid(m);
                let at_two = (decision as i64 - m2).rem_euclid(m);
                out.terminal_errors[0] += u64::from(at_one != m2);
                out.terminal_errors[1] += u64::from(at_two != m1);
                if decision == truth && (at_one != m2 || at_two != m1) {
                    out.implication_violations += 1;
                }
            }
        }
    }
    out
}
