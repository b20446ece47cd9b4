use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::unit_root;

use super::decouple::UserSignature;
use super::{argmax, TimingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcteMode {
    /// Searches `p̃` over `Υ_2(β̂, p̃)`.
    Generic,
    /// `V = 2` only: `p̂` from the phase of one lag-one correlation.
    ClosedFormV2,
}

/// Energy of the inverse transforms in the circular window starting at
/// `β̃`: `Υ_1(β̃) = Σ_{ℓ=β̃}^{β̃+L−1} Σ_ν |ŝ(ν, ℓ mod Q)|²`.
pub fn upsilon_1(user: &UserSignature, beta: usize, window: usize) -> f64 {
    (beta..beta + window)
        .map(|l| {
            (0..user.v_per_subband())
                .map(|nu| user.impulse_at(nu, l).norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

/// Cross terms between adjacent-bin transforms,
/// `Υ_2(β̃, p̃) = 2 Re Σ_ℓ Σ_ν Σ_n ŝ(ν, ℓ) ŝ*(ν+n, ℓ) e^{−j2πn(ℓ+p̃Q)/N}`.
pub fn upsilon_2(user: &UserSignature, beta: usize, p: usize, window: usize) -> f64 {
    let v = user.v_per_subband();
    let q = user.q_subbands();
    let n = user.n_subcarriers as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in beta..beta + window {
        for nu in 0..v.saturating_sub(1) {
            let a = user.impulse_at(nu, l);
            for lag in 1..v - nu {
                let b = user.impulse_at(nu + lag, l).conj();
                acc += a * b * unit_root(-((lag * (l + p * q)) as i64), n);
            }
        }
    }
    2.0 * acc.re
}

/// Reduced-complexity timing: `β̂` maximizes `Υ_1`, then `p̂` maximizes
/// `Υ_2(β̂, ·)` (or follows from the closed form when `V = 2`).
///
/// Candidates are restricted so that `θ̂ = β̂ + p̂Q ≤ θ_max`.
pub fn rcte_estimate(user: &UserSignature, window: usize, theta_max: usize, mode: RcteMode) -> Result<TimingResult> {
    let v = user.v_per_subband();
    if v < 2 {
        return Err(Error::Ambiguity);
    }
    if mode == RcteMode::ClosedFormV2 && v != 2 {
        return Err(Error::Parameter(format!("closed-form p̂ needs V = 2, got V = {v}")));
    }
    let q = user.q_subbands();
    let betas: Vec<f64> = (0..q.min(theta_max + 1)).map(|b| upsilon_1(user, b, window)).collect();
    let beta = argmax(&betas);
    let p_count = (theta_max - beta) / q + 1;

    let p = match mode {
        RcteMode::Generic => {
            let values: Vec<f64> = (0..p_count).map(|p| upsilon_2(user, beta, p, window)).collect();
            argmax(&values)
        }
        RcteMode::ClosedFormV2 => {
            let phi = lag_one_phase(user, beta, window);
            let step = 2.0 * PI * q as f64 / user.n_subcarriers as f64;
            // argmax of cos(φ − 2πpQ/N); equals round(Nφ/(2πQ)) inside the range
            let scores: Vec<f64> = (0..p_count).map(|p| (phi - step * p as f64).cos()).collect();
            argmax(&scores)
        }
    };
    Ok(TimingResult {
        code: user.code,
        theta: beta + p * q,
        beta: Some(beta),
        p: Some(p),
        metric: Some(betas),
    })
}

/// `φ = arg Σ_{ℓ=β̂}^{β̂+L−1} ŝ(0, ℓ) ŝ*(1, ℓ) e^{−j2πℓ/N}`.
fn lag_one_phase(user: &UserSignature, beta: usize, window: usize) -> f64 {
    let n = user.n_subcarriers as u64;
    (beta..beta + window)
        .map(|l| user.impulse_at(0, l) * user.impulse_at(1, l).conj() * unit_root(-(l as i64), n))
        .sum::<Complex64>()
        .arg()
}
