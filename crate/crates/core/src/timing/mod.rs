//! Timing recovery after code detection.
//!
//! The detected users are separated bin by bin with a least-squares solve
//! against their rotated codes. Each user's `Q`-point inverse transforms
//! then feed either the exhaustive least-squares timing search or the
//! reduced-complexity split `θ = β + pQ`, after which the channel taps
//! follow in closed form. The energy detector of the FLM baseline lives
//! here too since it works on the same per-bin code correlations.

mod cir;
mod decouple;
mod flm;
mod lste;
mod rcte;

pub use cir::{estimate_cir, CirEstimate};
pub use decouple::{decouple_signatures, decouple_with, DecoupledSignatures, UserSignature, CONDITION_LIMIT};
pub use flm::{estimate_noise_power, flm_detect, flm_metric, flm_threshold, FLM_DEFAULT_LAMBDA};
pub use lste::{lste_estimate, lste_metric};
pub use rcte::{rcte_estimate, upsilon_1, upsilon_2, RcteMode};

/// Timing estimate for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingResult {
    pub code: usize,
    /// `θ̂` in samples.
    pub theta: usize,
    /// `β̂ ∈ 0..Q` (reduced-complexity only).
    pub beta: Option<usize>,
    /// `p̂ ∈ 0..P` with `θ̂ = β̂ + p̂Q` (reduced-complexity only).
    pub p: Option<usize>,
    /// Metric over the searched candidates, when kept.
    pub metric: Option<Vec<f64>>,
}

/// First index of the maximum; smallest index wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
