use rand::seq::index::sample;
use rand::RngExt;

use super::config::ExperimentConfig;
use super::metrics::timing_error_event;
use super::NoiseMode;
use crate::airlink::{
    draw_channel, receiver_frontend, synthesize_scene, ChannelProfile, CodeBook, SubchannelLoad,
    SubchannelObservation, UserTruth,
};
use crate::error::{Error, Result};
use crate::numkit::{CMatrix, SeededStream};
use crate::subspace::detect_codes;
use crate::timing::{decouple_signatures, estimate_noise_power, flm_detect, lste_estimate, rcte_estimate};

// Stream tags, combined with the trial index as `(trial << 16) | tag`.
const TAG_SCENARIO: u64 = 1;
const TAG_NOISE: u64 = 2;
const TAG_CHANNEL: u64 = 0x100;
const TAG_INTERFERER: u64 = 0x1000;

/// One operating point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioPoint {
    pub k_users: usize,
    pub omega_max: f64,
    pub snr_db: f64,
}

impl ScenarioPoint {
    /// `σ² = 10^{−SNR/10}`, zero for an infinite SNR.
    pub fn noise_var(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }
}

/// Per true user of the observed subchannel.
#[derive(Debug, Clone, PartialEq)]
pub struct UserOutcome {
    pub code: usize,
    pub epsilon: f64,
    pub theta: usize,
    /// Whether MCD declared this code active.
    pub detected: bool,
    pub epsilon_hat: Option<f64>,
    pub theta_ls: Option<usize>,
    pub theta_rc: Option<usize>,
    /// Timing error flags; `None` when the code was missed or the
    /// estimator was not run.
    pub ls_error: Option<bool>,
    pub rc_error: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McdOutcome {
    pub order: usize,
    pub detected: Vec<usize>,
    pub correct: bool,
    /// Detected codes could not be separated (near-collinear rotated
    /// codes); their timing is then missing.
    pub decoupling_failed: bool,
    pub users: Vec<UserOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlmOutcome {
    pub detected: Vec<usize>,
    pub correct: bool,
    /// Noise power used in the threshold.
    pub noise_var: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub point: ScenarioPoint,
    pub trial: u64,
    /// Sorted.
    pub true_codes: Vec<usize>,
    pub mcd: Option<McdOutcome>,
    /// `None` also when the noise power is zero (no threshold exists).
    pub flm: Option<FlmOutcome>,
}

/// Everything random about one trial except the noise level.
///
/// The signal part and a unit-variance noise observation are kept apart so
/// that every SNR of a sweep reuses the same users, channels and noise
/// realisation (`Y = Y_signal + σ·Y_noise`).
#[derive(Debug, Clone)]
pub struct TrialScene {
    pub trial: u64,
    pub users: Vec<UserTruth>,
    pub interferers: Vec<(usize, Vec<UserTruth>)>,
    pub clean: SubchannelObservation,
    pub unit_noise: SubchannelObservation,
}

fn stream(cfg: &ExperimentConfig, trial: u64, tag: u64) -> SeededStream {
    SeededStream::new(cfg.seed, (trial << 16) | tag)
}

fn draw_users(
    cfg: &ExperimentConfig,
    k: usize,
    omega_max: f64,
    trial: u64,
    scenario_tag: u64,
    channel_tag: u64,
) -> Result<Vec<UserTruth>> {
    let plan = &cfg.plan;
    let profile = ChannelProfile::new(plan.channel_len, cfg.channel_decay)?;
    let mut rng = stream(cfg, trial, scenario_tag).rng();
    let codes = sample(&mut rng, plan.code_count(), k).into_vec();
    let mut users = Vec::with_capacity(k);
    for (u, c) in codes.into_iter().enumerate() {
        let theta = rng.random_range(0..=plan.theta_max);
        let unit: f64 = rng.random_range(-1.0..=1.0);
        users.push(UserTruth {
            code: c + 1,
            theta,
            epsilon: unit * omega_max,
            taps: draw_channel(&profile, stream(cfg, trial, channel_tag + u as u64)),
        });
    }
    Ok(users)
}

impl TrialScene {
    pub fn draw(cfg: &ExperimentConfig, k_users: usize, omega_max: f64, trial: u64) -> Result<Self> {
        let plan = &cfg.plan;
        let users = draw_users(cfg, k_users, omega_max, trial, TAG_SCENARIO, TAG_CHANNEL)?;
        let mut interferers = Vec::with_capacity(cfg.interfering_subchannels);
        for j in 0..cfg.interfering_subchannels {
            let r = (cfg.subchannel + 1 + j) % plan.r_subchannels;
            let base = TAG_INTERFERER + 0x100 * j as u64;
            interferers.push((r, draw_users(cfg, k_users, omega_max, trial, base, base + 1)?));
        }
        let mut loads = vec![SubchannelLoad {
            subchannel: cfg.subchannel,
            users: &users,
        }];
        loads.extend(interferers.iter().map(|(r, u)| SubchannelLoad {
            subchannel: *r,
            users: u,
        }));
        let unused = stream(cfg, trial, TAG_SCENARIO);
        let clean = receiver_frontend(&synthesize_scene(&loads, plan, 0.0, unused)?, plan, cfg.subchannel)?;
        let noise = synthesize_scene(&[], plan, 1.0, stream(cfg, trial, TAG_NOISE))?;
        let unit_noise = receiver_frontend(&noise, plan, cfg.subchannel)?;
        Ok(Self {
            trial,
            users,
            interferers,
            clean,
            unit_noise,
        })
    }

    /// Observation at noise power `noise_var`.
    pub fn observation(&self, noise_var: f64) -> Result<SubchannelObservation> {
        if noise_var == 0.0 {
            return Ok(self.clean.clone());
        }
        let sd = noise_var.sqrt();
        let (c, n) = (&self.clean.data, &self.unit_noise.data);
        let data = CMatrix::from_fn(c.rows(), c.cols(), |i, j| c[(i, j)] + n[(i, j)] * sd);
        SubchannelObservation::new(self.clean.subchannel, self.clean.q_subbands, self.clean.v_per_subband, data)
    }

    pub fn true_codes(&self) -> Vec<usize> {
        let mut codes: Vec<usize> = self.users.iter().map(|u| u.code).collect();
        codes.sort_unstable();
        codes
    }

    /// Runs the configured detectors and estimators at one SNR.
    pub fn evaluate(&self, cfg: &ExperimentConfig, point: ScenarioPoint) -> Result<TrialOutcome> {
        let plan = &cfg.plan;
        let noise_var = point.noise_var();
        let obs = self.observation(noise_var)?;
        let book = CodeBook::fourier(plan.m_blocks)?;
        let true_codes = self.true_codes();

        let mcd = if cfg.detector.runs_mcd() {
            Some(self.run_mcd(cfg, point, &obs, &book, &true_codes)?)
        } else {
            None
        };
        let flm = if cfg.detector.runs_flm() {
            let var = match cfg.flm_noise {
                NoiseMode::Genie => noise_var,
                NoiseMode::Estimated => estimate_noise_power(&obs),
            };
            if var > 0.0 {
                let detected = flm_detect(&obs, &book, var, cfg.flm_lambda)?;
                Some(FlmOutcome {
                    correct: detected == true_codes,
                    detected,
                    noise_var: var,
                })
            } else {
                None
            }
        } else {
            None
        };
        Ok(TrialOutcome {
            point,
            trial: self.trial,
            true_codes,
            mcd,
            flm,
        })
    }

    fn run_mcd(
        &self,
        cfg: &ExperimentConfig,
        point: ScenarioPoint,
        obs: &SubchannelObservation,
        book: &CodeBook,
        true_codes: &[usize],
    ) -> Result<McdOutcome> {
        let plan = &cfg.plan;
        let detection = detect_codes(obs, book, &cfg.cfo_search(point.omega_max), plan)?;
        let detected = detection.detected_codes();
        let signatures = if detected.is_empty() {
            None
        } else {
            match decouple_signatures(obs, &detection, book, plan) {
                Ok(s) => Some(s),
                Err(Error::Decoupling { .. }) => None,
                Err(e) => return Err(e),
            }
        };
        let decoupling_failed = !detected.is_empty() && signatures.is_none();

        let mut users = Vec::with_capacity(self.users.len());
        let mut sorted: Vec<&UserTruth> = self.users.iter().collect();
        sorted.sort_by_key(|u| u.code);
        for truth in sorted {
            let cand = detection.get(truth.code);
            let sig = signatures.as_ref().and_then(|s| s.user(truth.code));
            let flag = |theta: usize| timing_error_event(
                    theta as i64,
                    truth.theta as i64,
                    plan.cp_len_data as i64,
                    plan.channel_len as i64,
                );
            let theta_ls = match sig {
                Some(s) if cfg.estimator.runs_ls() => Some(lste_estimate(s, cfg.rx_channel_len, plan.theta_max)?.theta),
                _ => None,
            };
            let theta_rc = match sig {
                Some(s) if cfg.estimator.runs_rc() => {
                    Some(rcte_estimate(s, cfg.rx_channel_len, plan.theta_max, cfg.rc_mode)?.theta)
                }
                _ => None,
            };
            users.push(UserOutcome {
                code: truth.code,
                epsilon: truth.epsilon,
                theta: truth.theta,
                detected: cand.is_some(),
                epsilon_hat: cand.map(|c| c.epsilon),
                theta_ls,
                theta_rc,
                ls_error: theta_ls.map(flag),
                rc_error: theta_rc.map(flag),
            });
        }
        Ok(McdOutcome {
            order: detection.order,
            correct: detected == true_codes,
            detected,
            decoupling_failed,
            users,
        })
    }
}

/// One trial at one operating point. All randomness comes from streams
/// keyed by the master seed and `trial`.
pub fn run_trial(cfg: &ExperimentConfig, point: ScenarioPoint, trial: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    if point.k_users > cfg.plan.code_count() || !(point.omega_max >= 0.0) {
        return Err(Error::Configuration(format!("invalid operating point {point:?}")));
    }
    TrialScene::draw(cfg, point.k_users, point.omega_max, trial)?.evaluate(cfg, point)
}
