use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::airlink::RangingPlan;
use crate::error::{Error, Result};
use crate::subspace::CfoSearch;
use crate::timing::{RcteMode, FLM_DEFAULT_LAMBDA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    Ls,
    Rc,
    Both,
}

impl EstimatorChoice {
    pub fn runs_ls(self) -> bool {
        matches!(self, Self::Ls | Self::Both)
    }

    pub fn runs_rc(self) -> bool {
        matches!(self, Self::Rc | Self::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorChoice {
    Mcd,
    Flm,
    Both,
}

impl DetectorChoice {
    pub fn runs_mcd(self) -> bool {
        matches!(self, Self::Mcd | Self::Both)
    }

    pub fn runs_flm(self) -> bool {
        matches!(self, Self::Flm | Self::Both)
    }
}

/// Noise power handed to the energy detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// The true `σ²`.
    Genie,
    /// Estimated from the unused all-ones code direction.
    Estimated,
}

/// How users whose code was missed enter `P(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissPolicy {
    /// A missed user counts as a timing error.
    Count,
    /// Missed users are left out of the ratio.
    Exclude,
}

/// One Monte Carlo experiment. Lists (`k_users`, `omega_max`, `snr_db`)
/// span a grid; every combination is a separate operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub plan: RangingPlan,
    pub channel_decay: f64,
    /// Channel length assumed by the receiver, `L_rx ≥ L`.
    pub rx_channel_len: usize,
    pub k_users: Vec<usize>,
    pub omega_max: Vec<f64>,
    /// `SNR = 1/σ²` in dB; `inf` means noiseless.
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub subchannel: usize,
    /// Other subchannels populated with their own random stations.
    pub interfering_subchannels: usize,
    pub estimator: EstimatorChoice,
    pub rc_mode: RcteMode,
    pub detector: DetectorChoice,
    pub flm_lambda: f64,
    pub flm_noise: NoiseMode,
    pub cfo_grid_step: f64,
    /// Search bound as a multiple of `Ω`.
    pub cfo_search_factor: f64,
    pub cfo_refine: bool,
    pub timing_miss_policy: MissPolicy,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    /// Directory for the CSV, plot script and resolved config.
    pub out_dir: PathBuf,
}

/// Smallest CFO search bound, used when `Ω` is zero or tiny.
pub(crate) const MIN_SEARCH_BOUND: f64 = 0.01;

impl ExperimentConfig {
    /// Reference plan with all defaults.
    pub fn new(snr_db: Vec<f64>, trials: usize) -> Self {
        Self {
            plan: RangingPlan::REFERENCE,
            channel_decay: 12.0,
            rx_channel_len: RangingPlan::REFERENCE.channel_len,
            k_users: vec![2],
            omega_max: vec![0.05],
            snr_db,
            trials,
            seed: 1,
            subchannel: 0,
            interfering_subchannels: 0,
            estimator: EstimatorChoice::Both,
            rc_mode: RcteMode::Generic,
            detector: DetectorChoice::Both,
            flm_lambda: FLM_DEFAULT_LAMBDA,
            flm_noise: NoiseMode::Genie,
            cfo_grid_step: CfoSearch::DEFAULT_STEP,
            cfo_search_factor: CfoSearch::DEFAULT_MARGIN,
            cfo_refine: true,
            timing_miss_policy: MissPolicy::Count,
            threads: 0,
            out_dir: PathBuf::from("results"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.check(&BTreeMap::new())
    }

    pub fn cfo_search(&self, omega_max: f64) -> CfoSearch {
        CfoSearch {
            bound: (self.cfo_search_factor * omega_max).max(MIN_SEARCH_BOUND),
            step: self.cfo_grid_step,
            refine: self.cfo_refine,
        }
    }

    fn check(&self, lines: &BTreeMap<&'static str, usize>) -> Result<()> {
        let fail = |key: &'static str, message: String| -> Result<()> {
            match lines.get(key) {
                Some(&line) => Err(Error::Config { line, message }),
                None => Err(Error::Configuration(message)),
            }
        };
        if let Err(Error::Configuration(msg)) = self.plan.validate() {
            return fail("n_subcarriers", msg);
        }
        let m = self.plan.m_blocks;
        if let Some(&k) = self.k_users.iter().find(|&&k| k > m - 1) {
            return fail("k_users", format!("k_users = {k} violates K ≤ M−1 = {}", m - 1));
        }
        if self.k_users.is_empty() {
            return fail("k_users", "k_users must not be empty".into());
        }
        if self.omega_max.is_empty() || self.omega_max.iter().any(|&o| !(o >= 0.0) || !o.is_finite()) {
            return fail("omega_max", "omega_max values must be finite and ≥ 0".into());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return fail("snr_db", "snr_db needs at least one value (dB or inf)".into());
        }
        if self.trials == 0 {
            return fail("trials", "trials must be ≥ 1".into());
        }
        if !(self.channel_decay > 0.0) {
            return fail("channel_decay", "channel_decay must be positive".into());
        }
        if self.rx_channel_len < self.plan.channel_len || self.rx_channel_len > self.plan.q_subbands {
            return fail(
                "rx_channel_len",
                format!(
                    "rx_channel_len must lie in [L, Q] = [{}, {}]",
                    self.plan.channel_len, self.plan.q_subbands
                ),
            );
        }
        if self.subchannel >= self.plan.r_subchannels {
            return fail("subchannel", format!("subchannel must be < R = {}", self.plan.r_subchannels));
        }
        if self.interfering_subchannels >= self.plan.r_subchannels {
            return fail(
                "interfering_subchannels",
                format!("at most R−1 = {} interfering subchannels", self.plan.r_subchannels - 1),
            );
        }
        if !(self.flm_lambda > 0.0) {
            return fail("flm_lambda", "flm_lambda must be positive".into());
        }
        if !(self.cfo_grid_step > 0.0) {
            return fail("cfo_grid_step", "cfo_grid_step must be positive".into());
        }
        if !(self.cfo_search_factor > 0.0) {
            return fail("cfo_search_factor", "cfo_search_factor must be positive".into());
        }
        if self.rc_mode == RcteMode::ClosedFormV2 && self.plan.v_per_subband != 2 && self.estimator.runs_rc() {
            return fail("rc_mode", "closed_form needs v_per_subband = 2".into());
        }
        if self.plan.v_per_subband < 2 && self.estimator.runs_rc() {
            return fail("estimator", "the reduced-complexity estimator needs v_per_subband ≥ 2".into());
        }
        Ok(())
    }

    /// Canonical `key = value` listing of every setting.
    pub fn to_text(&self) -> String {
        let p = &self.plan;
        let mut s = String::new();
        let list = |v: &[String]| v.join(",");
        let _ = writeln!(s, "n_subcarriers = {}", p.n_subcarriers);
        let _ = writeln!(s, "q_subbands = {}", p.q_subbands);
        let _ = writeln!(s, "r_subchannels = {}", p.r_subchannels);
        let _ = writeln!(s, "v_per_subband = {}", p.v_per_subband);
        let _ = writeln!(s, "m_blocks = {}", p.m_blocks);
        let _ = writeln!(s, "cp_len = {}", p.cp_len);
        let _ = writeln!(s, "cp_len_data = {}", p.cp_len_data);
        let _ = writeln!(s, "theta_max = {}", p.theta_max);
        let _ = writeln!(s, "channel_len = {}", p.channel_len);
        let _ = writeln!(s, "channel_decay = {}", self.channel_decay);
        let _ = writeln!(s, "rx_channel_len = {}", self.rx_channel_len);
        let _ = writeln!(s, "k_users = {}", list(&self.k_users.iter().map(|k| k.to_string()).collect::<Vec<_>>()));
        let _ = writeln!(s, "omega_max = {}", list(&self.omega_max.iter().map(|o| o.to_string()).collect::<Vec<_>>()));
        let _ = writeln!(s, "snr_db = {}", list(&self.snr_db.iter().map(|o| o.to_string()).collect::<Vec<_>>()));
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "subchannel = {}", self.subchannel);
        let _ = writeln!(s, "interfering_subchannels = {}", self.interfering_subchannels);
        let _ = writeln!(
            s,
            "estimator = {}",
            match self.estimator {
                EstimatorChoice::Ls => "ls",
                EstimatorChoice::Rc => "rc",
                EstimatorChoice::Both => "both",
            }
        );
        let _ = writeln!(
            s,
            "rc_mode = {}",
            match self.rc_mode {
                RcteMode::Generic => "generic",
                RcteMode::ClosedFormV2 => "closed_form",
            }
        );
        let _ = writeln!(
            s,
            "detector = {}",
            match self.detector {
                DetectorChoice::Mcd => "mcd",
                DetectorChoice::Flm => "flm",
                DetectorChoice::Both => "both",
            }
        );
        let _ = writeln!(s, "flm_lambda = {}", self.flm_lambda);
        let _ = writeln!(
            s,
            "flm_noise = {}",
            match self.flm_noise {
                NoiseMode::Genie => "genie",
                NoiseMode::Estimated => "estimated",
            }
        );
        let _ = writeln!(s, "cfo_grid_step = {}", self.cfo_grid_step);
        let _ = writeln!(s, "cfo_search_factor = {}", self.cfo_search_factor);
        let _ = writeln!(s, "cfo_refine = {}", self.cfo_refine);
        let _ = writeln!(
            s,
            "timing_miss_policy = {}",
            match self.timing_miss_policy {
                MissPolicy::Count => "count",
                MissPolicy::Exclude => "exclude",
            }
        );
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        s
    }
}

const KEYS: &[&str] = &[
    "n_subcarriers",
    "q_subbands",
    "r_subchannels",
    "v_per_subband",
    "m_blocks",
    "cp_len",
    "cp_len_data",
    "theta_max",
    "channel_len",
    "channel_decay",
    "rx_channel_len",
    "k_users",
    "omega_max",
    "snr_db",
    "trials",
    "seed",
    "subchannel",
    "interfering_subchannels",
    "estimator",
    "rc_mode",
    "detector",
    "flm_lambda",
    "flm_noise",
    "cfo_grid_step",
    "cfo_search_factor",
    "cfo_refine",
    "timing_miss_policy",
    "threads",
    "out_dir",
];

const REQUIRED: &[&str] = &["snr_db", "trials"];

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated
/// keys are rejected, and every unset key takes its default.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| Error::Config {
            line,
            message: format!("unknown key `{key}`"),
        })?;
        if let Some((first, _)) = entries.get(known) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key `{key}` (first set on line {first}, again on line {line})"),
            });
        }
        entries.insert(known, (line, value.trim().to_string()));
    }
    for key in REQUIRED {
        if !entries.contains_key(key) {
            return Err(Error::MissingKey((*key).to_string()));
        }
    }

    let mut cfg = ExperimentConfig::new(Vec::new(), 0);
    let mut plan = cfg.plan;
    let mut rx_len = None;
    let mut lines = BTreeMap::new();
    for (key, (line, value)) in &entries {
        let line = *line;
        lines.insert(*key, line);
        match *key {
            "n_subcarriers" => plan.n_subcarriers = scalar(value, line)?,
            "q_subbands" => plan.q_subbands = scalar(value, line)?,
            "r_subchannels" => plan.r_subchannels = scalar(value, line)?,
            "v_per_subband" => plan.v_per_subband = scalar(value, line)?,
            "m_blocks" => plan.m_blocks = scalar(value, line)?,
            "cp_len" => plan.cp_len = scalar(value, line)?,
            "cp_len_data" => plan.cp_len_data = scalar(value, line)?,
            "theta_max" => plan.theta_max = scalar(value, line)?,
            "channel_len" => plan.channel_len = scalar(value, line)?,
            "channel_decay" => cfg.channel_decay = scalar(value, line)?,
            "rx_channel_len" => rx_len = Some(scalar(value, line)?),
            "k_users" => cfg.k_users = list(value, line)?,
            "omega_max" => cfg.omega_max = list(value, line)?,
            "snr_db" => cfg.snr_db = list(value, line)?,
            "trials" => cfg.trials = scalar(value, line)?,
            "seed" => cfg.seed = scalar(value, line)?,
            "subchannel" => cfg.subchannel = scalar(value, line)?,
            "interfering_subchannels" => cfg.interfering_subchannels = scalar(value, line)?,
            "estimator" => {
                cfg.estimator = choice(
                    value,
                    line,
                    &[("ls", EstimatorChoice::Ls), ("rc", EstimatorChoice::Rc), ("both", EstimatorChoice::Both)],
                )?
            }
            "rc_mode" => {
                cfg.rc_mode = choice(
                    value,
                    line,
                    &[("generic", RcteMode::Generic), ("closed_form", RcteMode::ClosedFormV2)],
                )?
            }
            "detector" => {
                cfg.detector = choice(
                    value,
                    line,
                    &[("mcd", DetectorChoice::Mcd), ("flm", DetectorChoice::Flm), ("both", DetectorChoice::Both)],
                )?
            }
            "flm_lambda" => cfg.flm_lambda = scalar(value, line)?,
            "flm_noise" => {
                cfg.flm_noise = choice(value, line, &[("genie", NoiseMode::Genie), ("estimated", NoiseMode::Estimated)])?
            }
            "cfo_grid_step" => cfg.cfo_grid_step = scalar(value, line)?,
            "cfo_search_factor" => cfg.cfo_search_factor = scalar(value, line)?,
            "cfo_refine" => cfg.cfo_refine = scalar(value, line)?,
            "timing_miss_policy" => {
                cfg.timing_miss_policy =
                    choice(value, line, &[("count", MissPolicy::Count), ("exclude", MissPolicy::Exclude)])?
            }
            "threads" => cfg.threads = scalar(value, line)?,
            "out_dir" => {
                if value.is_empty() {
                    return Err(Error::Config {
                        line,
                        message: "out_dir must not be empty".into(),
                    });
                }
                cfg.out_dir = PathBuf::from(value)
            }
            _ => unreachable!("key table and match arms out of sync"),
        }
    }
    cfg.plan = plan;
    cfg.rx_channel_len = rx_len.unwrap_or(plan.channel_len);
    cfg.check(&lines)?;
    Ok(cfg)
}

fn scalar<T: FromStr>(value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("cannot parse `{value}` as {}", std::any::type_name::<T>()),
    })
}

fn list<T: FromStr>(value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| scalar(v.trim(), line))
        .collect()
}

fn choice<T: Copy>(value: &str, line: usize, options: &[(&str, T)]) -> Result<T> {
    options
        .iter()
        .find(|(name, _)| *name == value)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Config {
            line,
            message: format!(
                "`{value}` is not one of {}",
                options.iter().map(|(n, _)| *n).collect::<Vec<_>>().join("|")
            ),
        })
}
