use num_complex::Complex64;

use super::codebook::CodeBook;
use super::frontend::SubchannelObservation;
use super::plan::RangingPlan;
use super::user::{ranging_signature, validate_users, UserTruth};
use crate::error::Result;
use crate::numkit::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Keeps the intercarrier leakage `A(ω) = F V(ω) F^H`.
    Exact,
    /// Replaces `A(ω)` by the identity: the CFO only rotates whole blocks.
    Approx,
}

/// Noiseless DFT outputs of subchannel `r` evaluated directly in the
/// frequency domain, `Y_m = Σ_k c_k(m) e^{jmωN_T} A(ω) S_k(θ_k)`.
pub fn model_oracle(
    users: &[UserTruth],
    plan: &RangingPlan,
    r: usize,
    mode: OracleMode,
) -> Result<SubchannelObservation> {
    plan.validate()?;
    validate_users(users, plan)?;
    let bins = plan.subchannel_bins(r)?;
    let book = CodeBook::fourier(plan.m_blocks)?;
    let qv = bins.len();
    let n = plan.n_subcarriers;
    let mut data = CMatrix::zeros(plan.m_blocks, qv);

    for user in users {
        let omega = user.omega(plan);
        let sig = ranging_signature(user, plan, r)?;
        let leaked: Vec<Complex64> = match mode {
            OracleMode::Approx => sig,
            OracleMode::Exact => (0..qv)
                .map(|a| {
                    (0..qv)
                        .map(|b| {
                            let x = omega + 2.0 * std::f64::consts::PI * (bins[b] as f64 - bins[a] as f64) / n as f64;
                            dirichlet(x, n) * sig[b]
                        })
                        .sum()
                })
                .collect(),
        };
        let code = book.code(user.code)?;
        for (m, &cm) in code.iter().enumerate() {
            let rot = cm * Complex64::from_polar(1.0, m as f64 * omega * plan.block_len() as f64);
            for (c, v) in leaked.iter().enumerate() {
                data[(m, c)] += rot * v;
            }
        }
    }
    SubchannelObservation::new(r, plan.q_subbands, plan.v_per_subband, data)
}

/// `(1/N) Σ_{n<N} e^{jnx}` in closed form.
fn dirichlet(x: f64, n: usize) -> Complex64 {
    let half = 0.5 * x;
    let den = half.sin();
    if den == 0.0 {
        // x is a multiple of 2π
        return Complex64::new(1.0, 0.0);
    }
    let nf = n as f64;
    Complex64::from_polar((nf * half).sin() / (nf * den), (nf - 1.0) * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_matches_sum() {
        for &x in &[1e-9, 0.003, -0.2, 1.7, 2.0 * std::f64::consts::PI * 5.0 / 64.0 + 0.01] {
            let n = 64;
            let direct: Complex64 = (0..n).map(|k| Complex64::from_polar(1.0, k as f64 * x)).sum::<Complex64>() / n as f64;
            assert!((dirichlet(x, n) - direct).norm() < 1e-13, "x={x}");
        }
        assert_eq!(dirichlet(0.0, 1024), Complex64::new(1.0, 0.0));
    }
}
