#![allow(dead_code)]

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::RngExt;
use ranging_core::airlink::{draw_channel, ChannelProfile, RangingPlan, UserTruth};
use ranging_core::numkit::SeededStream;

/// `k` users with distinct random codes, uniform timing over `0..=θ_max`
/// and CFO uniform in `[-omega, omega]`.
pub fn random_users(plan: &RangingPlan, k: usize, omega: f64, seed: u64) -> Vec<UserTruth> {
    let mut rng = SeededStream::new(seed, 0xfeed).rng();
    let codes = sample(&mut rng, plan.code_count(), k).into_vec();
    codes
        .into_iter()
        .enumerate()
        .map(|(u, c)| UserTruth {
            code: c + 1,
            theta: rng.random_range(0..=plan.theta_max),
            epsilon: if omega > 0.0 { rng.random_range(-omega..=omega) } else { 0.0 },
            taps: draw_channel(
                &ChannelProfile::new(plan.channel_len, 12.0).unwrap(),
                SeededStream::new(seed, 0x100 + u as u64),
            ),
        })
        .collect()
}

pub fn flat_taps(len: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); len];
    h[0] = Complex64::new(1.0, 0.0);
    h
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

use ranging_core::airlink::{receiver_frontend, synthesize_uplink, SubchannelObservation};

/// Front-end output for `users` on subchannel 0 at the given SNR
/// (`None` for noiseless).
pub fn observe(plan: &RangingPlan, users: &[UserTruth], snr_db: Option<f64>, seed: u64) -> SubchannelObservation {
    let noise = snr_db.map_or(0.0, |s| 10f64.powf(-s / 10.0));
    let rx = synthesize_uplink(users, plan, 0, noise, SeededStream::new(seed, 0xabc)).unwrap();
    receiver_frontend(&rx, plan, 0).unwrap()
}

pub fn sorted_codes(users: &[UserTruth]) -> Vec<usize> {
    let mut c: Vec<usize> = users.iter().map(|u| u.code).collect();
    c.sort_unstable();
    c
}
