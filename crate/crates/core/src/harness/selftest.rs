use num_complex::Complex64;
use rand::seq::index::sample;
use rand::RngExt;

use super::metrics::timing_error_event;
use crate::airlink::{
    draw_channel, model_oracle, receiver_frontend, synthesize_uplink, ChannelProfile, CodeBook, OracleMode,
    RangingPlan, UserTruth,
};
use crate::error::Result;
use crate::numkit::{dft, hermitian_eig, sample_cgaussian, CMatrix, SeededStream};
use crate::subspace::{detect_codes, sample_correlation, CfoSearch};
use crate::timing::{decouple_with, estimate_cir, lste_estimate, lste_metric, rcte_estimate, upsilon_1, upsilon_2, RcteMode};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation or a short reason.
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn users(plan: &RangingPlan, k: usize, omega: f64, seed: u64, tag: u64) -> Vec<UserTruth> {
    let mut rng = SeededStream::new(seed, tag).rng();
    let profile = ChannelProfile::reference();
    sample(&mut rng, plan.code_count(), k)
        .into_iter()
        .enumerate()
        .map(|(u, c)| UserTruth {
            code: c + 1,
            theta: rng.random_range(0..=plan.theta_max),
            epsilon: rng.random_range(-1.0..=1.0) * omega,
            taps: draw_channel(&profile, SeededStream::new(seed, (tag << 8) + u as u64)),
        })
        .collect()
}

/// Quick oracle-equivalence and identity suite on the reference plan.
/// Runs in well under a second in release builds.
pub fn run_selftest(seed: u64) -> Result<Vec<CheckResult>> {
    let plan = RangingPlan::REFERENCE;
    let book = CodeBook::fourier(plan.m_blocks)?;
    let mut out = Vec::new();

    // DFT unitarity
    let mut worst: f64 = 0.0;
    for t in 0..4 {
        let x = sample_cgaussian(SeededStream::new(seed, 0x10 + t), 1024, 1.0)?;
        let y = dft(&x, false)?;
        let ex: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        worst = worst.max((ex - ey).abs() / ex);
        let back = dft(&y, true)?;
        worst = worst.max(x.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    out.push(check("dft parseval/inverse", worst, 1e-12));

    // eigen reconstruction and FB persymmetry
    let mut worst_eig: f64 = 0.0;
    let mut worst_fb: f64 = 0.0;
    for t in 0..8 {
        let z = sample_cgaussian(SeededStream::new(seed, 0x20 + t), 4 * 32, 1.0)?;
        let obs = crate::airlink::SubchannelObservation::new(0, 16, 2, CMatrix::from_row_major(4, 32, z)?)?;
        let corr = sample_correlation(&obs)?;
        let eig = hermitian_eig(&corr.r_hat)?;
        let err = eig.reconstruct().sub(&corr.r_hat)?.frobenius_norm() / corr.r_hat.frobenius_norm();
        worst_eig = worst_eig.max(err);
        let r = &corr.r_tilde;
        for a in 0..4 {
            for b in 0..4 {
                worst_fb = worst_fb.max((r[(a, b)] - r[(3 - b, 3 - a)]).norm());
            }
        }
    }
    out.push(check("eigen reconstruction", worst_eig, 1e-10));
    out.push(check("forward-backward persymmetry", worst_fb, 0.0));

    // time-domain synthesis vs frequency-domain model
    let mut worst: f64 = 0.0;
    for t in 0..10 {
        let u = users(&plan, 1 + (t as usize % 3), 0.075, seed, 0x30 + t);
        let rx = synthesize_uplink(&u, &plan, 0, 0.0, SeededStream::new(seed, 0))?;
        let got = receiver_frontend(&rx, &plan, 0)?;
        let want = model_oracle(&u, &plan, 0, OracleMode::Exact)?;
        let scale = want.data.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dev = got.data.sub(&want.data)?.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(dev / scale);
    }
    out.push(check("synthesis vs model oracle", worst, 1e-9));

    // Υ = Υ1 + Υ2 on noisy decoupled signatures
    let mut worst: f64 = 0.0;
    for t in 0..5 {
        let u = users(&plan, 2, 0.05, seed, 0x40 + t);
        let rx = synthesize_uplink(&u, &plan, 0, 0.1, SeededStream::new(seed, 0x50 + t))?;
        let obs = receiver_frontend(&rx, &plan, 0)?;
        let pairs: Vec<(usize, f64)> = u.iter().map(|x| (x.code, x.omega(&plan))).collect();
        let sigs = decouple_with(&obs, &pairs, &book, &plan)?;
        for s in &sigs.users {
            for theta in 0..=plan.theta_max {
                let (beta, p) = (theta % plan.q_subbands, theta / plan.q_subbands);
                let full = lste_metric(s, theta, plan.channel_len, plan.theta_max)?;
                let split = upsilon_1(s, beta, plan.channel_len) + upsilon_2(s, beta, p, plan.channel_len);
                worst = worst.max((full - split).abs() / full.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    out.push(check("timing metric split", worst, 1e-10));

    // noiseless single user: exact timing, taps and detection
    let mut failures = Vec::new();
    let mut worst_taps: f64 = 0.0;
    for theta in (0..=plan.theta_max).step_by(17) {
        let mut u = users(&plan, 1, 0.0, seed, 0x60 + theta as u64);
        u[0].theta = theta;
        let obs = receiver_frontend(&synthesize_uplink(&u, &plan, 0, 0.0, SeededStream::new(seed, 0))?, &plan, 0)?;
        let det = detect_codes(&obs, &book, &CfoSearch::for_max_cfo(0.05), &plan)?;
        if det.detected_codes() != vec![u[0].code] {
            failures.push(format!("detection at θ={theta}"));
            continue;
        }
        let sigs = decouple_with(&obs, &[(u[0].code, 0.0)], &book, &plan)?;
        let s = &sigs.users[0];
        let ls = lste_estimate(s, plan.channel_len, plan.theta_max)?.theta;
        let rc = rcte_estimate(s, plan.channel_len, plan.theta_max, RcteMode::Generic)?.theta;
        let cf = rcte_estimate(s, plan.channel_len, plan.theta_max, RcteMode::ClosedFormV2)?.theta;
        if [ls, rc, cf] != [theta; 3] {
            failures.push(format!("timing at θ={theta}: {ls}/{rc}/{cf}"));
        }
        let h = estimate_cir(s, theta, plan.channel_len);
        let dev = h
            .taps
            .iter()
            .zip(&u[0].taps)
            .map(|(a, b): (&Complex64, &Complex64)| (a - b).norm())
            .fold(0.0, f64::max);
        worst_taps = worst_taps.max(dev);
    }
    out.push(CheckResult {
        name: "noiseless detection and timing",
        passed: failures.is_empty(),
        detail: if failures.is_empty() { "all offsets exact".into() } else { failures.join("; ") },
    });
    out.push(check("noiseless channel taps", worst_taps, 1e-9));

    let window: Vec<i64> = (-100..100).filter(|&d| !timing_error_event(d, 0, 64, 12)).collect();
    out.push(CheckResult {
        name: "timing error window",
        passed: window.first() == Some(&-27) && window.last() == Some(&26) && window.len() == 54,
        detail: format!("{:?}..={:?}", window.first(), window.last()),
    });
    Ok(out)
}
