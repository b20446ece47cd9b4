use num_complex::Complex64;

use crate::numkit::unit_root;

use super::decouple::UserSignature;

#[derive(Debug, Clone, PartialEq)]
pub struct CirEstimate {
    pub code: usize,
    pub taps: Vec<Complex64>,
}

/// Least-squares taps for a given timing,
/// `ĥ(ℓ) = (1/QV) Σ_{q,ν} e^{j2π(ℓ+θ̂)i_{q,ν}/N} Ŝ(i_{q,ν})`.
///
/// This is the exact LS solution while `taps ≤ Q`.
pub fn estimate_cir(user: &UserSignature, theta: usize, taps: usize) -> CirEstimate {
    let n = user.n_subcarriers as u64;
    let count = (user.q_subbands() * user.v_per_subband()) as f64;
    let taps = (0..taps)
        .map(|l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (bins, spec) in user.bins.iter().zip(&user.spectrum) {
                for (&i, s) in bins.iter().zip(spec) {
                    acc += unit_root(((l + theta) * i) as i64, n) * s;
                }
            }
            acc / count
        })
        .collect();
    CirEstimate { code: user.code, taps }
}
