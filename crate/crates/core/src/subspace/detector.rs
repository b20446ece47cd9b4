use crate::airlink::{CodeBook, RangingPlan, SubchannelObservation};
use crate::error::{Error, Result};
use crate::numkit::hermitian_eig;

use super::correlation::sample_correlation;
use super::mdl::mdl_order;
use super::music::{projection_weights, CfoSearch, NoiseSubspace, SteeringGrid};

/// A code together with its CFO estimate and pseudospectrum peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeCandidate {
    pub code: usize,
    pub omega: f64,
    pub epsilon: f64,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// MDL order `K̂`.
    pub order: usize,
    /// Eigenvalues of the FB-averaged correlation, non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Every code of the book, in code order.
    pub candidates: Vec<CodeCandidate>,
    /// The `K̂` codes with the largest peaks, in code order.
    pub detected: Vec<CodeCandidate>,
}

impl DetectionResult {
    pub fn detected_codes(&self) -> Vec<usize> {
        self.detected.iter().map(|c| c.code).collect()
    }

    pub fn get(&self, code: usize) -> Option<&CodeCandidate> {
        self.detected.iter().find(|c| c.code == code)
    }
}

/// MUSIC-based code detection.
///
/// `K̂` comes from MDL on the eigenvalues of `R̃`; every code of the book is
/// then searched for its CFO and the `K̂` largest pseudospectrum peaks are
/// declared active. `K̂ = 0` yields an empty active set.
pub fn detect_codes(
    obs: &SubchannelObservation,
    codebook: &CodeBook,
    search: &CfoSearch,
    plan: &RangingPlan,
) -> Result<DetectionResult> {
    let m = obs.blocks();
    if codebook.code_len() != m {
        return Err(Error::Dimension(format!(
            "codes of length {} for {m} blocks",
            codebook.code_len()
        )));
    }
    let corr = sample_correlation(obs)?;
    let eig = hermitian_eig(&corr.r_tilde)?;
    let order = mdl_order(&eig.values, corr.snapshots, m)?.min(codebook.size());
    let noise = NoiseSubspace::from_eigen(&eig, order)?;
    let grid = SteeringGrid::new(search, plan, m)?;

    let mut candidates = Vec::with_capacity(codebook.size());
    for k in codebook.indices() {
        let est = grid.peak(&projection_weights(codebook.code(k)?, &noise));
        candidates.push(CodeCandidate {
            code: k,
            omega: est.omega,
            epsilon: est.epsilon,
            peak: est.peak,
        });
    }

    let mut ranked: Vec<&CodeCandidate> = candidates.iter().collect();
    // stable sort: equal peaks keep code order
    ranked.sort_by(|a, b| b.peak.total_cmp(&a.peak));
    let mut detected: Vec<CodeCandidate> = ranked.into_iter().take(order).copied().collect();
    detected.sort_by_key(|c| c.code);

    Ok(DetectionResult {
        order,
        eigenvalues: eig.values,
        candidates,
        detected,
    })
}
