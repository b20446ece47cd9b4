use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::channel::channel_frequency_response;
use super::plan::RangingPlan;
use crate::error::{Error, Result};
use crate::numkit::unit_root;

/// Ground truth for one ranging station.
#[derive(Debug, Clone, PartialEq)]
pub struct UserTruth {
    /// Code index, `1..=M−1`.
    pub code: usize,
    /// Timing offset in samples.
    pub theta: usize,
    /// CFO as a fraction of the subcarrier spacing.
    pub epsilon: f64,
    pub taps: Vec<Complex64>,
}

impl UserTruth {
    /// CFO in radians per sample, `2πε/N`.
    pub fn omega(&self, plan: &RangingPlan) -> f64 {
        2.0 * PI * self.epsilon / plan.n_subcarriers as f64
    }
}

/// Checks a set of users sharing one subchannel.
pub fn validate_users(users: &[UserTruth], plan: &RangingPlan) -> Result<()> {
    if users.len() > plan.code_count() {
        return Err(Error::Configuration(format!(
            "{} users exceed the {} available codes",
            users.len(),
            plan.code_count()
        )));
    }
    let mut codes = HashSet::new();
    for u in users {
        if u.code == 0 || u.code > plan.code_count() {
            return Err(Error::Configuration(format!("code {} outside 1..={}", u.code, plan.code_count())));
        }
        if !codes.insert(u.code) {
            return Err(Error::Configuration(format!("code {} used twice", u.code)));
        }
        if u.theta > plan.theta_max {
            return Err(Error::Configuration(format!(
                "timing offset {} exceeds θ_max = {}",
                u.theta, plan.theta_max
            )));
        }
        if u.taps.is_empty() || u.theta + u.taps.len() > plan.cp_len {
            return Err(Error::Configuration(format!(
                "θ + channel length = {} does not fit the cyclic prefix {}",
                u.theta + u.taps.len(),
                plan.cp_len
            )));
        }
        if !u.epsilon.is_finite() {
            return Err(Error::Configuration("non-finite CFO".into()));
        }
    }
    Ok(())
}

/// Frequency-domain signature `S(i) = e^{−j2πθi/N} H(i)` over the bins of
/// subchannel `r`, ordered by `(q, ν)`.
pub fn ranging_signature(user: &UserTruth, plan: &RangingPlan, r: usize) -> Result<Vec<Complex64>> {
    let n = plan.n_subcarriers;
    Ok(plan
        .subchannel_bins(r)?
        .into_iter()
        .map(|i| unit_root(-((user.theta * i) as i64), n as u64) * channel_frequency_response(&user.taps, i, n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airlink::{draw_channel, ChannelProfile};
    use crate::numkit::SeededStream;

    fn flat() -> Vec<Complex64> {
        let mut h = vec![Complex64::new(0.0, 0.0); 12];
        h[0] = Complex64::new(1.0, 0.0);
        h
    }

    #[test]
    fn trivial_signatures() {
        let plan = RangingPlan::REFERENCE;
        let u = UserTruth { code: 1, theta: 0, epsilon: 0.0, taps: flat() };
        let s = ranging_signature(&u, &plan, 3).unwrap();
        assert!(s.iter().all(|z| *z == Complex64::new(1.0, 0.0)));

        let u = UserTruth { theta: 512, ..u };
        let s = ranging_signature(&u, &plan, 3).unwrap();
        for (z, i) in s.iter().zip(plan.subchannel_bins(3).unwrap()) {
            let expect = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(*z, Complex64::new(expect, 0.0));
        }
    }

    #[test]
    fn matches_direct_product() {
        let plan = RangingPlan::REFERENCE;
        let taps = draw_channel(&ChannelProfile::reference(), SeededStream::new(8, 1));
        let u = UserTruth { code: 2, theta: 137, epsilon: 0.0, taps: taps.clone() };
        let s = ranging_signature(&u, &plan, 5).unwrap();
        let n = plan.n_subcarriers as f64;
        for (z, i) in s.iter().zip(plan.subchannel_bins(5).unwrap()) {
            let h: Complex64 = taps
                .iter()
                .enumerate()
                .map(|(l, t)| t * Complex64::from_polar(1.0, -2.0 * PI * l as f64 * i as f64 / n))
                .sum();
            let direct = Complex64::from_polar(1.0, -2.0 * PI * 137.0 * i as f64 / n) * h;
            assert!((z - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        let plan = RangingPlan::REFERENCE;
        let u = UserTruth { code: 1, theta: 0, epsilon: 0.0, taps: flat() };
        assert!(validate_users(&[u.clone(), u.clone()], &plan).is_err());
        assert!(validate_users(&[UserTruth { theta: 205, ..u.clone() }], &plan).is_err());
        assert!(validate_users(&[UserTruth { code: 4, ..u.clone() }], &plan).is_err());
        assert!(validate_users(&[UserTruth { code: 0, ..u.clone() }], &plan).is_err());
        let four: Vec<_> = (1..=4).map(|c| UserTruth { code: c, ..u.clone() }).collect();
        assert!(validate_users(&four, &plan).is_err());
        assert!(validate_users(&[UserTruth { theta: 204, ..u }], &plan).is_ok());
    }
}
