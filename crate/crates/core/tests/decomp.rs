mod common;

use common::{random_orthogonal, random_proper, random_shape, rng, singular_values_by_jacobi};
use dmac_core::decomp::{
    build_time_extension, extension_efficiency, gmd, gtd_feasible, jet_shared_left,
    jet_shared_right, qr_gtd, svd_gtd, verify_joint_triangularization, JointFactor, Orientation,
    Tolerances,
};
use dmac_core::linalg::{normalize_to_proper, singular_values, validate_proper};
use dmac_core::{tol, Error, Matrix};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn gmd_on_random_proper_matrices() {
    let mut r = rng(1);
    for _ in 0..300 {
        let (m, n) = random_shape(&mut r, 8, 12);
        let h = random_proper(&mut r, m, n);
        let g = gmd(&h).unwrap();
        let check = g.check(&h, tol::RECONSTRUCTION);
        assert!(check.pass, "{m}x{n}: {check:?}");
        for d in &g.diag {
            assert!((d - 1.0).abs() < 1e-8, "{:?}", g.diag);
        }
        assert_eq!(g.t.shape(), (m, n));
    }
}

#[test]
fn svd_and_qr_gtds_on_random_matrices() {
    let mut r = rng(2);
    for _ in 0..200 {
        let (m, n) = random_shape(&mut r, 8, 12);
        let h = common::gaussian(&mut r, m, n);
        for g in [svd_gtd(&h).unwrap(), qr_gtd(&h).unwrap()] {
            assert!(g.check(&h, tol::RECONSTRUCTION).pass);
            assert!(g.diag.iter().all(|&d| d >= 0.0));
        }
    }
}

#[test]
fn singular_values_match_independent_eigen_iteration() {
    let mut r = rng(3);
    for _ in 0..100 {
        let (m, n) = random_shape(&mut r, 6, 9);
        let h = common::gaussian(&mut r, m, n);
        let ours = singular_values(&h).unwrap();
        let oracle = singular_values_by_jacobi(&h);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9 * oracle[0], "{ours:?} vs {oracle:?}");
        }
    }
}

#[test]
fn singular_values_invariant_under_rotations() {
    let mut r = rng(4);
    for _ in 0..100 {
        let (m, n) = random_shape(&mut r, 8, 12);
        let h = common::gaussian(&mut r, m, n);
        let rotated = random_orthogonal(&mut r, m)
            .matmul(&h)
            .matmul(&random_orthogonal(&mut r, n));
        let a = singular_values(&h).unwrap();
        let b = singular_values(&rotated).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9 * a[0].max(1.0));
        }
    }
}

#[test]
fn jet_left_on_random_pairs() {
    let mut r = rng(5);
    for _ in 0..200 {
        let n_r = r.random_range(2..=6);
        let (c1, c2) = (r.random_range(n_r..=9), r.random_range(n_r..=9));
        let h1 = random_proper(&mut r, n_r, c1);
        let h2 = random_proper(&mut r, n_r, c2);
        let jt = jet_shared_left(&h1, &h2).unwrap();
        assert_eq!(jt.orientation, Orientation::SharedLeft);
        let report =
            verify_joint_triangularization(&jt, &[h1.clone(), h2.clone()], &Tolerances::default())
                .unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.diagonal_disparity <= 1e-8);
        let product: f64 = jt.diag.iter().product();
        assert!((product - 1.0).abs() < 1e-8);
        assert!(jt.diag.iter().all(|&d| d > 0.0));
        assert_eq!(jt.per_matrix[0].triangular.shape(), h1.shape());
    }
}

#[test]
fn jet_right_on_transposed_pairs() {
    let mut r = rng(6);
    for _ in 0..100 {
        let n = r.random_range(2..=5);
        let (m1, m2) = (r.random_range(n..=8), r.random_range(n..=8));
        let a1 = random_proper(&mut r, n, m1).transpose();
        let a2 = random_proper(&mut r, n, m2).transpose();
        let jt = jet_shared_right(&a1, &a2).unwrap();
        let report =
            verify_joint_triangularization(&jt, &[a1, a2], &Tolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
    }
}

#[test]
fn verifier_flags_perturbed_factor() {
    let mut r = rng(7);
    let h1 = random_proper(&mut r, 3, 4);
    let h2 = random_proper(&mut r, 3, 5);
    let mut jt = jet_shared_left(&h1, &h2).unwrap();
    jt.per_matrix[1].triangular[(2, 0)] += 1e-3;
    let report = verify_joint_triangularization(&jt, &[h1, h2], &Tolerances::default()).unwrap();
    assert!(!report.pass);
    assert!((report.factors[1].reconstruction_abs - 1e-3).abs() < 1e-9);
}

#[test]
fn verifier_accepts_thin_external_factors() {
    // H_k = U·T_k·V_kᵀ with V_k having orthonormal columns only
    let u = Matrix::identity(2);
    let t1 = Matrix::from_rows(&[[1.0, 0.0], [0.5, 1.0]]);
    let t2 = Matrix::from_rows(&[[1.0, 0.0], [-2.0, 1.0]]);
    let s = 0.5f64.sqrt();
    let v = Matrix::from_rows(&[[s, 0.0], [s, 0.0], [0.0, 1.0]]);
    let h1 = t1.matmul(&v.transpose());
    let h2 = t2.matmul(&v.transpose());
    let jt = dmac_core::decomp::JointTriangularization {
        shared: u,
        per_matrix: vec![
            JointFactor {
                orthogonal: v.clone(),
                triangular: t1,
            },
            JointFactor {
                orthogonal: v,
                triangular: t2,
            },
        ],
        diag: vec![1.0, 1.0],
        orientation: Orientation::SharedLeft,
    };
    let report = verify_joint_triangularization(&jt, &[h1, h2], &Tolerances::default()).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn time_extension_structure() {
    let mut r = rng(8);
    let hs: Vec<Matrix> = (0..3).map(|_| random_proper(&mut r, 2, 3)).collect();
    let ext = build_time_extension(&hs, 9).unwrap();
    assert_eq!(ext.truncated_rows, 8);
    for (e, h) in ext.extended.iter().zip(&hs) {
        assert_eq!(e.shape(), (18, 27));
        for b in 0..9 {
            for c in 0..9 {
                let block = e.submatrix(2 * b, 2 * b + 2, 3 * c, 3 * c + 3);
                if b == c {
                    assert_eq!(&block, h);
                } else {
                    assert_eq!(block.max_abs(), 0.0);
                }
            }
        }
    }
    assert!(matches!(
        build_time_extension(&hs, 1),
        Err(Error::TooFewBlocks {
            blocks: 1,
            required: 2
        })
    ));
}

#[test]
fn extension_efficiency_increases_to_one() {
    let mut last = 0.0;
    for n in [2usize, 3, 10, 100, 1000, 1_000_000] {
        let e = extension_efficiency(2, 3, n).unwrap();
        assert!(e >= last && e <= 1.0);
        last = e;
    }
    assert!(1.0 - last < 1e-5);
}

/// Gauss–Newton search for a 3×3 lower-triangular `T` with prescribed
/// diagonal whose Gram matrix has the eigenvalues `sigma²`: matching the
/// trace and the second elementary symmetric function suffices once the
/// determinant agrees.
fn brute_force_gtd_exists(sigma: &[f64; 3], diag: &[f64; 3], rng: &mut rand::rngs::StdRng) -> bool {
    let det_target: f64 = sigma.iter().product();
    let det_diag: f64 = diag.iter().product();
    if (det_target - det_diag).abs() > 1e-9 * det_target {
        return false;
    }
    let s2: Vec<f64> = sigma.iter().map(|s| s * s).collect();
    let tr_target: f64 = s2.iter().sum();
    let e2_target = s2[0] * s2[1] + s2[0] * s2[2] + s2[1] * s2[2];
    let residual = |x: &[f64; 3]| -> [f64; 2] {
        let t = [
            [diag[0], 0.0, 0.0],
            [x[0], diag[1], 0.0],
            [x[1], x[2], diag[2]],
        ];
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = (0..3).map(|k| t[i][k] * t[j][k]).sum();
            }
        }
        let tr = g[0][0] + g[1][1] + g[2][2];
        let tr2: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| g[i][j] * g[j][i])
            .sum();
        let e2 = 0.5 * (tr * tr - tr2);
        [(tr - tr_target) / tr_target, (e2 - e2_target) / e2_target]
    };
    let scale = tr_target.sqrt();
    for _ in 0..40 {
        let mut x = [0.0; 3];
        x.iter_mut()
            .for_each(|v| *v = scale * rng.random_range(-1.0..1.0));
        for _ in 0..300 {
            let f = residual(&x);
            if f[0].abs().max(f[1].abs()) < 1e-12 {
                break;
            }
            let mut jac = [[0.0; 3]; 2];
            for k in 0..3 {
                let h = 1e-7 * scale.max(x[k].abs());
                let (mut xp, mut xm) = (x, x);
                xp[k] += h;
                xm[k] -= h;
                let (fp, fm) = (residual(&xp), residual(&xm));
                for r in 0..2 {
                    jac[r][k] = (fp[r] - fm[r]) / (2.0 * h);
                }
            }
            // minimum-norm step: Δ = −Jᵀ (J Jᵀ + λI)⁻¹ f
            let lambda = 1e-12;
            let a = [
                [
                    jac[0].iter().map(|v| v * v).sum::<f64>() + lambda,
                    (0..3).map(|k| jac[0][k] * jac[1][k]).sum::<f64>(),
                ],
                [
                    (0..3).map(|k| jac[0][k] * jac[1][k]).sum::<f64>(),
                    jac[1].iter().map(|v| v * v).sum::<f64>() + lambda,
                ],
            ];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let y = [
                (a[1][1] * f[0] - a[0][1] * f[1]) / det,
                (a[0][0] * f[1] - a[1][0] * f[0]) / det,
            ];
            for k in 0..3 {
                x[k] -= jac[0][k] * y[0] + jac[1][k] * y[1];
            }
        }
        let f = residual(&x);
        if f[0].abs().max(f[1].abs()) <= 1e-6 {
            return true;
        }
    }
    false
}

#[test]
fn gtd_feasibility_agrees_with_brute_force() {
    let mut r = rng(9);
    let mut compared = 0;
    let mut agree = 0;
    while compared < 200 {
        let mut sigma = [0.0; 3];
        sigma
            .iter_mut()
            .for_each(|s| *s = (r.random_range(-1.5..1.5f64)).exp());
        let mut logs = [
            r.random_range(-1.5..1.5f64),
            r.random_range(-1.5..1.5f64),
            0.0,
        ];
        let total: f64 = sigma.iter().map(|s| s.ln()).sum();
        logs[2] = total - logs[0] - logs[1];
        let diag = logs.map(f64::exp);

        // skip prescriptions within 1e-3 of the majorization boundary
        let mut s_sorted: Vec<f64> = sigma.iter().map(|s| s.ln()).collect();
        let mut p_sorted = logs.to_vec();
        s_sorted.sort_by(|a, b| b.total_cmp(a));
        p_sorted.sort_by(|a, b| b.total_cmp(a));
        let margin =
            (s_sorted[0] - p_sorted[0]).min(s_sorted[0] + s_sorted[1] - p_sorted[0] - p_sorted[1]);
        if margin.abs() < 1e-3 {
            continue;
        }
        compared += 1;
        let fast = gtd_feasible(&sigma, &diag).unwrap();
        let slow = brute_force_gtd_exists(&sigma, &diag, &mut r);
        agree += usize::from(fast == slow);
    }
    assert!(agree >= 198, "agreement {agree}/200");
}

#[test]
fn normalization_examples() {
    let two = normalize_to_proper(&Matrix::from_diag(2, 2, &[2.0, 2.0]), 1.0).unwrap();
    assert!(two.matrix().relative_error(&Matrix::identity(2)) < 1e-15);
    assert!((two.power() - 4.0).abs() < 1e-12);
    let tall = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
    let report = validate_proper(&tall, tol::PROPER).unwrap();
    assert!(!report.shape_ok());
}

proptest! {
    #[test]
    fn normalization_always_yields_proper(seed in any::<u64>(), rows in 1usize..5, extra in 0usize..4, power in 1e-3f64..1e6) {
        let mut r = rng(seed);
        let h = common::gaussian(&mut r, rows, rows + extra);
        let c = normalize_to_proper(&h, power).unwrap();
        prop_assert!(validate_proper(c.matrix(), tol::PROPER).unwrap().is_proper());
        // effective SNR scale is preserved: det(P·H·Hᵀ/N_r) is unchanged
        let before = singular_values(&h).unwrap().iter().map(|s| (s * s * power).ln()).sum::<f64>();
        let after = singular_values(c.matrix()).unwrap().iter().map(|s| (s * s * c.power()).ln()).sum::<f64>();
        prop_assert!((before - after).abs() < 1e-8 * before.abs().max(1.0));
    }

    #[test]
    fn singular_values_are_a_feasible_diagonal(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let h = common::gaussian(&mut r, n, n);
        let sigma = singular_values(&h).unwrap();
        prop_assert!(gtd_feasible(&sigma, &sigma).unwrap());
        let mut reversed = sigma.clone();
        reversed.reverse();
        prop_assert!(gtd_feasible(&sigma, &reversed).unwrap());
        let mean = sigma.iter().map(|s| s.ln()).sum::<f64>() / n as f64;
        prop_assert!(gtd_feasible(&sigma, &vec![mean.exp(); n]).unwrap());
    }

    #[test]
    fn gmd_diagonal_is_feasible_and_unit(seed in any::<u64>(), rows in 2usize..6, extra in 0usize..3) {
        let mut r = rng(seed);
        let h = random_proper(&mut r, rows, rows + extra);
        let g = gmd(&h).unwrap();
        let sigma = singular_values(&h).unwrap();
        prop_assert!(gtd_feasible(&sigma, &g.diag).unwrap());
        prop_assert!(g.check(&h, tol::RECONSTRUCTION).pass);
    }
}
