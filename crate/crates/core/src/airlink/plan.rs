use crate::error::{Error, Result};

/// Dimensioning of the ranging slot.
///
/// Subchannel `r` consists of `Q` subbands spread `N/Q` bins apart, each
/// made of `V` adjacent bins starting at `qN/Q + rN/(QR)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangingPlan {
    /// Total subcarriers `N`.
    pub n_subcarriers: usize,
    /// Subbands per ranging subchannel `Q`.
    pub q_subbands: usize,
    /// Ranging subchannels `R`.
    pub r_subchannels: usize,
    /// Adjacent bins per subband `V`.
    pub v_per_subband: usize,
    /// OFDM blocks per ranging slot `M`.
    pub m_blocks: usize,
    /// Ranging cyclic prefix `N_G` in samples.
    pub cp_len: usize,
    /// Data-phase cyclic prefix `N_{G,D}` in samples.
    pub cp_len_data: usize,
    /// Largest timing offset `θ_max` in samples.
    pub theta_max: usize,
    /// Channel length `L` in samples.
    pub channel_len: usize,
}

impl RangingPlan {
    /// N=1024, Q=16, R=8, V=2, M=4, N_G=256, N_GD=64, θ_max=204, L=12.
    pub const REFERENCE: RangingPlan = RangingPlan {
        n_subcarriers: 1024,
        q_subbands: 16,
        r_subchannels: 8,
        v_per_subband: 2,
        m_blocks: 4,
        cp_len: 256,
        cp_len_data: 64,
        theta_max: 204,
        channel_len: 12,
    };

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Configuration(msg));
        for (name, v) in [
            ("N", self.n_subcarriers),
            ("Q", self.q_subbands),
            ("M", self.m_blocks),
        ] {
            if !v.is_power_of_two() {
                return bad(format!("{name} = {v} must be a power of two"));
            }
        }
        if self.m_blocks < 2 {
            return bad("M must be at least 2".into());
        }
        if self.r_subchannels == 0 || self.v_per_subband == 0 || self.channel_len == 0 {
            return bad("R, V and L must be positive".into());
        }
        let qr = self.q_subbands * self.r_subchannels;
        if !self.n_subcarriers.is_multiple_of(qr) {
            return bad(format!("QR = {qr} must divide N = {}", self.n_subcarriers));
        }
        if self.v_per_subband > self.n_subcarriers / qr {
            return bad(format!(
                "V = {} exceeds N/(QR) = {}",
                self.v_per_subband,
                self.n_subcarriers / qr
            ));
        }
        if self.cp_len < self.theta_max + self.channel_len {
            return bad(format!(
                "N_G = {} must be at least θ_max + L = {}",
                self.cp_len,
                self.theta_max + self.channel_len
            ));
        }
        if self.cp_len >= self.n_subcarriers {
            return bad("N_G must be shorter than the block".into());
        }
        Ok(())
    }

    /// Samples per cyclically extended block, `N + N_G`.
    pub fn block_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    /// Samples in the whole slot, `M·N_T`.
    pub fn slot_len(&self) -> usize {
        self.m_blocks * self.block_len()
    }

    /// Bins per subchannel, `QV`.
    pub fn bins_per_subchannel(&self) -> usize {
        self.q_subbands * self.v_per_subband
    }

    /// Total ranging bins `N_R = QVR`.
    pub fn ranging_bins(&self) -> usize {
        self.bins_per_subchannel() * self.r_subchannels
    }

    /// Number of `Q`-multiples `P` such that every `θ ≤ θ_max` splits as
    /// `β + pQ` with `p < P`.
    pub fn timing_periods(&self) -> usize {
        self.theta_max / self.q_subbands + 1
    }

    pub fn code_count(&self) -> usize {
        self.m_blocks - 1
    }

    /// Bin index of offset `ν` in subband `q` of subchannel `r`.
    pub fn subcarrier_index(&self, q: usize, r: usize, nu: usize) -> Result<usize> {
        if q >= self.q_subbands || r >= self.r_subchannels || nu >= self.v_per_subband {
            return Err(Error::Index(format!(
                "(q={q}, r={r}, ν={nu}) outside Q={}, R={}, V={}",
                self.q_subbands, self.r_subchannels, self.v_per_subband
            )));
        }
        Ok(self.bin(q, r, nu))
    }

    pub(crate) fn bin(&self, q: usize, r: usize, nu: usize) -> usize {
        let n = self.n_subcarriers;
        q * n / self.q_subbands + r * n / (self.q_subbands * self.r_subchannels) + nu
    }

    /// All `QV` bins of subchannel `r`, ordered by `(q, ν)`.
    pub fn subchannel_bins(&self, r: usize) -> Result<Vec<usize>> {
        if r >= self.r_subchannels {
            return Err(Error::Index(format!("subchannel {r} >= R = {}", self.r_subchannels)));
        }
        let mut bins = Vec::with_capacity(self.bins_per_subchannel());
        for q in 0..self.q_subbands {
            for nu in 0..self.v_per_subband {
                bins.push(self.bin(q, r, nu));
            }
        }
        Ok(bins)
    }
}

impl Default for RangingPlan {
    fn default() -> Self {
        Self::REFERENCE
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn reference_indices() {
        let p = RangingPlan::REFERENCE;
        p.validate().unwrap();
        assert_eq!(p.subcarrier_index(0, 0, 0).unwrap(), 0);
        assert_eq!(p.subcarrier_index(1, 0, 0).unwrap(), 64);
        assert_eq!(p.subcarrier_index(3, 2, 1).unwrap(), 209);
        assert!(p.subcarrier_index(16, 0, 0).is_err());
        assert!(p.subcarrier_index(0, 8, 0).is_err());
        assert!(p.subcarrier_index(0, 0, 2).is_err());
    }

    #[test]
    fn index_sets_are_disjoint() {
        let p = RangingPlan::REFERENCE;
        let mut seen = HashSet::new();
        for r in 0..p.r_subchannels {
            for b in p.subchannel_bins(r).unwrap() {
                assert!(b < p.n_subcarriers);
                assert!(seen.insert(b), "bin {b} reused");
            }
        }
        assert_eq!(seen.len(), p.ranging_bins());
    }

    #[test]
    fn derived_sizes() {
        let p = RangingPlan::REFERENCE;
        assert_eq!(p.block_len(), 1280);
        assert_eq!(p.bins_per_subchannel(), 32);
        assert_eq!(p.ranging_bins(), 256);
        assert_eq!(p.timing_periods(), 13);
        assert_eq!(204 % 16 + 12 * 16, 204);
    }

    #[test]
    fn rejects_short_cp() {
        let p = RangingPlan {
            cp_len: 200,
            ..RangingPlan::REFERENCE
        };
        assert!(p.validate().is_err());
        let p = RangingPlan {
            v_per_subband: 9,
            ..RangingPlan::REFERENCE
        };
        assert!(p.validate().is_err());
        let p = RangingPlan {
            m_blocks: 3,
            ..RangingPlan::REFERENCE
        };
        assert!(p.validate().is_err());
    }
}
