use num_complex::Complex64;

use super::plan::RangingPlan;
use crate::error::{Error, Result};
use crate::numkit::{dft_in_place, CMatrix};

/// DFT outputs of one ranging subchannel over the slot.
///
/// Row `m` is block `m`; column `qV + ν` is bin `i_{q,ν}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubchannelObservation {
    pub subchannel: usize,
    pub q_subbands: usize,
    pub v_per_subband: usize,
    pub data: CMatrix,
}

impl SubchannelObservation {
    pub fn new(subchannel: usize, q_subbands: usize, v_per_subband: usize, data: CMatrix) -> Result<Self> {
        if data.cols() != q_subbands * v_per_subband {
            return Err(Error::Dimension(format!(
                "{} columns for Q·V = {}",
                data.cols(),
                q_subbands * v_per_subband
            )));
        }
        Ok(Self {
            subchannel,
            q_subbands,
            v_per_subband,
            data,
        })
    }

    pub fn blocks(&self) -> usize {
        self.data.rows()
    }

    /// Number of bin vectors, `QV`.
    pub fn snapshots(&self) -> usize {
        self.data.cols()
    }

    /// `Y(i)` for column `col`: the bin across all `M` blocks.
    pub fn bin_vector(&self, col: usize) -> Vec<Complex64> {
        self.data.column(col)
    }

    pub fn bin_vector_at(&self, q: usize, nu: usize) -> Vec<Complex64> {
        self.bin_vector(q * self.v_per_subband + nu)
    }

    pub fn bin_vectors(&self) -> impl Iterator<Item = Vec<Complex64>> + '_ {
        (0..self.snapshots()).map(move |c| self.bin_vector(c))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            data: self.data.scale(alpha),
            ..self.clone()
        }
    }
}

/// Strips each block's prefix, takes the unitary `N`-point DFT and keeps
/// the bins of subchannel `r`.
pub fn receiver_frontend(samples: &[Complex64], plan: &RangingPlan, r: usize) -> Result<SubchannelObservation> {
    if samples.len() != plan.slot_len() {
        return Err(Error::Framing {
            expected: plan.slot_len(),
            actual: samples.len(),
        });
    }
    let bins = plan.subchannel_bins(r)?;
    let n = plan.n_subcarriers;
    let mut data = CMatrix::zeros(plan.m_blocks, bins.len());
    let mut block = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..plan.m_blocks {
        let start = m * plan.block_len() + plan.cp_len;
        block.copy_from_slice(&samples[start..start + n]);
        dft_in_place(&mut block, false)?;
        for (c, &b) in bins.iter().enumerate() {
            data[(m, c)] = block[b];
        }
    }
    SubchannelObservation::new(r, plan.q_subbands, plan.v_per_subband, data)
}
