use num_complex::Complex64;

use super::codebook::CodeBook;
use super::plan::RangingPlan;
use super::user::{validate_users, UserTruth};
use crate::error::{Error, Result};
use crate::numkit::{dft_in_place, sample_cgaussian, SeededStream};

/// The stations transmitting on one ranging subchannel.
#[derive(Debug, Clone, Copy)]
pub struct SubchannelLoad<'a> {
    pub subchannel: usize,
    pub users: &'a [UserTruth],
}

/// Time-domain received slot (`M·N_T` samples) with only subchannel `r`
/// populated.
pub fn synthesize_uplink(
    users: &[UserTruth],
    plan: &RangingPlan,
    r: usize,
    noise_var: f64,
    stream: SeededStream,
) -> Result<Vec<Complex64>> {
    synthesize_scene(&[SubchannelLoad { subchannel: r, users }], plan, noise_var, stream)
}

/// Time-domain received slot for any number of populated subchannels.
///
/// Each station sends its code symbol `c_k(m)` on every bin of its
/// subchannel during block `m`, with a cyclic prefix of `N_G` samples. The
/// signal is delayed by `θ`, passed through the taps, and rotated so that
/// sample `n` of block `m` (counted after the prefix) carries phase
/// `e^{jω(mN_T + n)}`. Complex AWGN of variance `noise_var` per sample is
/// drawn from `stream`.
pub fn synthesize_scene(
    loads: &[SubchannelLoad<'_>],
    plan: &RangingPlan,
    noise_var: f64,
    stream: SeededStream,
) -> Result<Vec<Complex64>> {
    plan.validate()?;
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(Error::Parameter(format!("noise variance must be non-negative, got {noise_var}")));
    }
    for (i, load) in loads.iter().enumerate() {
        plan.subchannel_bins(load.subchannel)?;
        if loads[..i].iter().any(|l| l.subchannel == load.subchannel) {
            return Err(Error::Configuration(format!(
                "subchannel {} listed twice",
                load.subchannel
            )));
        }
        validate_users(load.users, plan)?;
    }

    let book = CodeBook::fourier(plan.m_blocks)?;
    let mut rx = if noise_var > 0.0 {
        sample_cgaussian(stream, plan.slot_len(), noise_var)?
    } else {
        vec![Complex64::new(0.0, 0.0); plan.slot_len()]
    };

    for load in loads {
        let bins = plan.subchannel_bins(load.subchannel)?;
        for user in load.users {
            let tx = transmit_slot(book.code(user.code)?, &bins, plan)?;
            add_received(&mut rx, &tx, user, plan);
        }
    }
    Ok(rx)
}

fn transmit_slot(code: &[Complex64], bins: &[usize], plan: &RangingPlan) -> Result<Vec<Complex64>> {
    let n = plan.n_subcarriers;
    let cp = plan.cp_len;
    let mut out = Vec::with_capacity(plan.slot_len());
    let mut block = vec![Complex64::new(0.0, 0.0); n];
    for &symbol in code {
        block.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for &b in bins {
            block[b] = symbol;
        }
        dft_in_place(&mut block, true)?;
        out.extend_from_slice(&block[n - cp..]);
        out.extend_from_slice(&block);
    }
    Ok(out)
}

fn add_received(rx: &mut [Complex64], tx: &[Complex64], user: &UserTruth, plan: &RangingPlan) {
    let omega = user.omega(plan);
    let cp = plan.cp_len as f64;
    for (t, out) in rx.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, h) in user.taps.iter().enumerate() {
            if let Some(src) = t.checked_sub(user.theta + l) {
                acc += h * tx[src];
            }
        }
        if omega != 0.0 {
            acc *= Complex64::from_polar(1.0, omega * (t as f64 - cp));
        }
        *out += acc;
    }
}
