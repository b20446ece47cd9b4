use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::{draw_cgaussian, unit_root, SeededStream};

/// Exponential power-delay profile, `E|h(ℓ)|² = σ_h² e^{−ℓ/decay}`, with
/// `σ_h²` chosen so that `E‖h‖² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProfile {
    pub taps: usize,
    pub decay: f64,
}

impl ChannelProfile {
    pub fn new(taps: usize, decay: f64) -> Result<Self> {
        if taps == 0 {
            return Err(Error::Parameter("channel needs at least one tap".into()));
        }
        if !(decay > 0.0) || !decay.is_finite() {
            return Err(Error::Parameter(format!("decay constant must be positive, got {decay}")));
        }
        Ok(Self { taps, decay })
    }

    /// `L = 12` taps decaying by one e-fold every 12 taps.
    pub fn reference() -> Self {
        Self { taps: 12, decay: 12.0 }
    }

    pub fn sigma_h2(&self) -> f64 {
        1.0 / (0..self.taps).map(|l| (-(l as f64) / self.decay).exp()).sum::<f64>()
    }

    /// Per-tap mean power.
    pub fn tap_powers(&self) -> Vec<f64> {
        let s = self.sigma_h2();
        (0..self.taps).map(|l| s * (-(l as f64) / self.decay).exp()).collect()
    }
}

/// One Rayleigh realization of the profile.
pub fn draw_channel(profile: &ChannelProfile, stream: SeededStream) -> Vec<Complex64> {
    let mut rng = stream.rng();
    let unit = draw_cgaussian(&mut rng, profile.taps, 1.0);
    unit.into_iter()
        .zip(profile.tap_powers())
        .map(|(z, p)| z * p.sqrt())
        .collect()
}

/// `H(i) = Σ_ℓ h(ℓ) e^{−j2πℓi/N}`; `bin` is taken modulo `N`.
pub fn channel_frequency_response(taps: &[Complex64], bin: usize, n: usize) -> Complex64 {
    taps.iter()
        .enumerate()
        .map(|(l, h)| h * unit_root(-((l * bin) as i64), n as u64))
        .sum()
}
