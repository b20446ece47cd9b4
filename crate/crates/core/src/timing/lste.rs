use crate::error::{Error, Result};
use crate::numkit::unit_root;

use super::decouple::UserSignature;
use super::{argmax, TimingResult};

/// Least-squares timing metric
/// `Υ(θ̃) = Σ_{ℓ=θ̃}^{θ̃+L−1} |Σ_ν ŝ(ν, ℓ mod Q) e^{j2πℓν/N}|²`.
///
/// `ŝ` is read modulo `Q`; the exponent uses the unwrapped `ℓ`.
pub fn lste_metric(user: &UserSignature, theta: usize, window: usize, theta_max: usize) -> Result<f64> {
    if theta > theta_max {
        return Err(Error::Contract(format!("candidate timing {theta} exceeds θ_max = {theta_max}")));
    }
    Ok(metric(user, theta, window))
}

fn metric(user: &UserSignature, theta: usize, window: usize) -> f64 {
    let n = user.n_subcarriers as u64;
    (theta..theta + window)
        .map(|l| {
            (0..user.v_per_subband())
                .map(|nu| user.impulse_at(nu, l) * unit_root((l * nu) as i64, n))
                .sum::<num_complex::Complex64>()
                .norm_sqr()
        })
        .sum()
}

/// Exhaustive search of [`lste_metric`] over `0..=θ_max`.
pub fn lste_estimate(user: &UserSignature, window: usize, theta_max: usize) -> Result<TimingResult> {
    let values: Vec<f64> = (0..=theta_max).map(|t| metric(user, t, window)).collect();
    Ok(TimingResult {
        code: user.code,
        theta: argmax(&values),
        beta: None,
        p: None,
        metric: Some(values),
    })
}
