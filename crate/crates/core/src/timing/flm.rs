use num_complex::Complex64;

use crate::airlink::{CodeBook, SubchannelObservation};
use crate::error::{Error, Result};

/// Default threshold factor over the noise-only mean of `Z_k`.
pub const FLM_DEFAULT_LAMBDA: f64 = 4.0;

/// `Z_k = (1/M²) Σ_{q,ν} |c_k^H Y(i_{q,ν})|²`.
pub fn flm_metric(obs: &SubchannelObservation, code: &[Complex64]) -> f64 {
    let m = obs.blocks() as f64;
    obs.bin_vectors()
        .map(|y| code.iter().zip(&y).map(|(c, v)| c.conj() * v).sum::<Complex64>().norm_sqr())
        .sum::<f64>()
        / (m * m)
}

/// `η = λ·QV·σ̂²/M`; with noise alone `E[Z_k] = QVσ²/M`.
pub fn flm_threshold(obs: &SubchannelObservation, noise_var: f64, lambda: f64) -> f64 {
    lambda * obs.snapshots() as f64 * noise_var / obs.blocks() as f64
}

/// Noise power from the all-ones direction, which no ranging code uses:
/// `σ̂² = (1/(QV·M)) Σ |1^H Y(i)|²`.
pub fn estimate_noise_power(obs: &SubchannelObservation) -> f64 {
    let m = obs.blocks() as f64;
    obs.bin_vectors()
        .map(|y| y.iter().sum::<Complex64>().norm_sqr())
        .sum::<f64>()
        / (obs.snapshots() as f64 * m)
}

/// Energy-detection baseline: code `k` is active iff `Z_k > η`.
pub fn flm_detect(obs: &SubchannelObservation, codebook: &CodeBook, noise_var: f64, lambda: f64) -> Result<Vec<usize>> {
    if !(noise_var > 0.0) {
        return Err(Error::Parameter(format!("noise power estimate must be positive, got {noise_var}")));
    }
    let eta = flm_threshold(obs, noise_var, lambda);
    let mut active = Vec::new();
    for k in codebook.indices() {
        if flm_metric(obs, codebook.code(k)?) > eta {
            active.push(k);
        }
    }
    Ok(active)
}
