mod common;

use common::{flat_taps, max_abs, max_abs_diff, random_users};
use num_complex::Complex64;
use ranging_core::airlink::*;
use ranging_core::numkit::{dft, SeededStream};

const PLAN: RangingPlan = RangingPlan::REFERENCE;

fn observe(users: &[UserTruth], r: usize, noise: f64, seed: u64) -> SubchannelObservation {
    let rx = synthesize_uplink(users, &PLAN, r, noise, SeededStream::new(seed, 1)).unwrap();
    receiver_frontend(&rx, &PLAN, r).unwrap()
}

#[test]
fn empty_scene_is_silent() {
    let rx = synthesize_uplink(&[], &PLAN, 0, 0.0, SeededStream::new(0, 0)).unwrap();
    assert_eq!(rx.len(), PLAN.slot_len());
    assert!(rx.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    let obs = receiver_frontend(&rx, &PLAN, 0).unwrap();
    assert!(obs.data.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
}

#[test]
fn ideal_single_user() {
    let book = fourier_codebook(PLAN.m_blocks).unwrap();
    for r in [0, 5] {
        let user = UserTruth { code: 3, theta: 0, epsilon: 0.0, taps: flat_taps(12) };
        let rx = synthesize_uplink(&[user], &PLAN, r, 0.0, SeededStream::new(0, 0)).unwrap();
        let code = book.code(3).unwrap();
        let own = PLAN.subchannel_bins(r).unwrap();
        for m in 0..PLAN.m_blocks {
            let start = m * PLAN.block_len() + PLAN.cp_len;
            let spec = dft(&rx[start..start + PLAN.n_subcarriers], false).unwrap();
            for (i, z) in spec.iter().enumerate() {
                let expect = if own.contains(&i) { code[m] } else { Complex64::new(0.0, 0.0) };
                assert!((z - expect).norm() < 1e-10, "block {m} bin {i}: {z}");
            }
        }
    }
}

#[test]
fn zero_cfo_matches_block_phase_model() {
    for seed in 0..5 {
        let users = random_users(&PLAN, 3, 0.0, seed);
        let obs = observe(&users, 2, 0.0, seed);
        let approx = model_oracle(&users, &PLAN, 2, OracleMode::Approx).unwrap();
        let exact = model_oracle(&users, &PLAN, 2, OracleMode::Exact).unwrap();
        assert!(max_abs_diff(obs.data.as_slice(), approx.data.as_slice()) < 1e-10);
        assert!(max_abs_diff(exact.data.as_slice(), approx.data.as_slice()) < 1e-12);
    }
}

#[test]
fn synthesis_matches_exact_oracle() {
    for seed in 0..20 {
        let k = 1 + (seed as usize % 3);
        let users = random_users(&PLAN, k, 0.075, 100 + seed);
        let r = seed as usize % PLAN.r_subchannels;
        let obs = observe(&users, r, 0.0, seed);
        let oracle = model_oracle(&users, &PLAN, r, OracleMode::Exact).unwrap();
        let scale = max_abs(oracle.data.as_slice());
        let dev = max_abs_diff(obs.data.as_slice(), oracle.data.as_slice()) / scale;
        assert!(dev < 1e-9, "seed {seed}: relative deviation {dev}");
    }
}

#[test]
fn approx_model_error_shrinks_with_cfo() {
    let base = random_users(&PLAN, 1, 0.0, 9);
    let mut last = f64::INFINITY;
    for eps in [0.05, 0.01, 0.002, 0.0004] {
        let users = vec![UserTruth { epsilon: eps, ..base[0].clone() }];
        let exact = model_oracle(&users, &PLAN, 0, OracleMode::Exact).unwrap();
        let approx = model_oracle(&users, &PLAN, 0, OracleMode::Approx).unwrap();
        let dev = max_abs_diff(exact.data.as_slice(), approx.data.as_slice()) / max_abs(approx.data.as_slice());
        assert!(dev > 0.0 && dev < last, "ε={eps} deviation {dev}");
        last = dev;
    }
    assert!(last < 5e-3);
}

#[test]
fn frontend_bin_selectivity() {
    let r = 3;
    let bin = PLAN.subcarrier_index(0, r, 0).unwrap();
    let n = PLAN.n_subcarriers;
    let mut rx = Vec::with_capacity(PLAN.slot_len());
    for _ in 0..PLAN.m_blocks {
        for t in 0..PLAN.block_len() {
            let n_in_block = t as i64 - PLAN.cp_len as i64;
            rx.push(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (bin as i64 * n_in_block) as f64 / n as f64));
        }
    }
    let obs = receiver_frontend(&rx, &PLAN, r).unwrap();
    for m in 0..PLAN.m_blocks {
        assert!((obs.data[(m, 0)] - Complex64::new((n as f64).sqrt(), 0.0)).norm() < 1e-9);
        for c in 1..obs.snapshots() {
            assert!(obs.data[(m, c)].norm() < 1e-9);
        }
    }
}

#[test]
fn frontend_rejects_wrong_length() {
    let rx = vec![Complex64::new(0.0, 0.0); PLAN.slot_len() - 1];
    assert!(matches!(
        receiver_frontend(&rx, &PLAN, 0),
        Err(ranging_core::Error::Framing { .. })
    ));
}

#[test]
fn noise_variance_preserved_by_frontend() {
    let sigma2 = 0.7;
    let mut sum = 0.0;
    let mut count = 0usize;
    let trials = 800;
    for t in 0..trials {
        let obs = observe(&[], t % PLAN.r_subchannels, sigma2, 5000 + t as u64);
        sum += obs.data.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
        count += obs.data.as_slice().len();
    }
    assert!(count >= 100_000);
    let var = sum / count as f64;
    assert!((var / sigma2 - 1.0).abs() < 0.02, "variance {var}");
}

#[test]
fn no_interblock_interference() {
    let users = random_users(&PLAN, 3, 0.05, 77);
    let users: Vec<_> = users.into_iter().map(|u| UserTruth { theta: PLAN.theta_max, ..u }).collect();
    let rx = synthesize_uplink(&users, &PLAN, 1, 0.0, SeededStream::new(0, 0)).unwrap();
    let full = receiver_frontend(&rx, &PLAN, 1).unwrap();
    for m in 0..PLAN.m_blocks {
        let mut masked = vec![Complex64::new(0.0, 0.0); rx.len()];
        let span = m * PLAN.block_len()..(m + 1) * PLAN.block_len();
        masked[span.clone()].copy_from_slice(&rx[span]);
        let only = receiver_frontend(&masked, &PLAN, 1).unwrap();
        for c in 0..full.snapshots() {
            assert!((only.data[(m, c)] - full.data[(m, c)]).norm() < 1e-12);
        }
    }
}

#[test]
fn configuration_errors() {
    let u = UserTruth { code: 1, theta: 0, epsilon: 0.0, taps: flat_taps(12) };
    let dup = [u.clone(), u.clone()];
    assert!(synthesize_uplink(&dup, &PLAN, 0, 0.0, SeededStream::new(0, 0)).is_err());
    let late = [UserTruth { theta: 205, ..u }];
    assert!(synthesize_uplink(&late, &PLAN, 0, 0.0, SeededStream::new(0, 0)).is_err());
    assert!(model_oracle(&late, &PLAN, 0, OracleMode::Exact).is_err());
}

#[test]
fn neighbour_subchannel_leaks_only_with_cfo() {
    let mine = random_users(&PLAN, 1, 0.0, 5);
    let theirs: Vec<_> = random_users(&PLAN, 2, 0.0, 6);
    let loads = [
        SubchannelLoad { subchannel: 0, users: &mine },
        SubchannelLoad { subchannel: 1, users: &theirs },
    ];
    let rx = synthesize_scene(&loads, &PLAN, 0.0, SeededStream::new(0, 0)).unwrap();
    let obs = receiver_frontend(&rx, &PLAN, 0).unwrap();
    let alone = model_oracle(&mine, &PLAN, 0, OracleMode::Exact).unwrap();
    assert!(max_abs_diff(obs.data.as_slice(), alone.data.as_slice()) < 1e-10);

    let theirs: Vec<_> = theirs.into_iter().map(|u| UserTruth { epsilon: 0.07, ..u }).collect();
    let loads = [
        SubchannelLoad { subchannel: 0, users: &mine },
        SubchannelLoad { subchannel: 1, users: &theirs },
    ];
    let rx = synthesize_scene(&loads, &PLAN, 0.0, SeededStream::new(0, 0)).unwrap();
    let obs = receiver_frontend(&rx, &PLAN, 0).unwrap();
    assert!(max_abs_diff(obs.data.as_slice(), alone.data.as_slice()) > 1e-4);
}
