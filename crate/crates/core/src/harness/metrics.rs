use rayon::prelude::*;

use super::config::{ExperimentConfig, MissPolicy};
use super::trial::{ScenarioPoint, TrialOutcome, TrialScene};
use crate::error::{Error, Result};

const Z95: f64 = 1.96;

/// Whether timing `θ̂` would cause interblock interference in the data
/// phase: with `d = θ̂ − θ`, an error iff `d + (L − N_GD)/2 > 0` or
/// `d + (L − N_GD)/2 < L − N_GD − 1`.
///
/// Both sides are doubled so odd `L − N_GD` needs no rounding. For
/// `N_GD = 64`, `L = 12` the error-free window is `−27 ≤ d ≤ 26`.
pub fn timing_error_event(theta_hat: i64, theta: i64, n_gd: i64, l: i64) -> bool {
    let twice = 2 * (theta_hat - theta) + (l - n_gd);
    twice > 0 || twice < 2 * (l - n_gd - 1)
}

/// One CSV row: a detector/estimator pair at one operating point.
///
/// Probabilities carry 95% Wald half-widths; the RMSE half-width follows
/// from the delta method on the mean squared error. Metrics that do not
/// apply (timing for the energy detector, RMSE with no correct trial) are
/// NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub snr_db: f64,
    pub k_users: usize,
    pub omega_max: f64,
    pub detector: &'static str,
    pub estimator: &'static str,
    pub trials: usize,
    pub pf: f64,
    pub pf_ci95: f64,
    /// In units of the subcarrier spacing (normalized `ε`).
    pub cfo_rmse: f64,
    pub cfo_rmse_ci95: f64,
    /// `P(ε)` with missed users counted as timing errors.
    pub p_eps_count: f64,
    pub p_eps_count_ci95: f64,
    /// `P(ε)` over detected users only.
    pub p_eps_exclude: f64,
    pub p_eps_exclude_ci95: f64,
}

impl MetricsRow {
    pub fn p_eps(&self, policy: MissPolicy) -> (f64, f64) {
        match policy {
            MissPolicy::Count => (self.p_eps_count, self.p_eps_count_ci95),
            MissPolicy::Exclude => (self.p_eps_exclude, self.p_eps_exclude_ci95),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
    /// Policy used for the `p_eps` CSV columns.
    pub policy: MissPolicy,
}

impl MetricsTable {
    pub fn empty(policy: MissPolicy) -> Self {
        Self { rows: Vec::new(), policy }
    }

    pub fn find(&self, snr_db: f64, k_users: usize, omega_max: f64, detector: &str, estimator: &str) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| {
            r.snr_db == snr_db
                && r.k_users == k_users
                && r.omega_max == omega_max
                && r.detector == detector
                && r.estimator == estimator
        })
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Ratio {
    hits: usize,
    total: usize,
}

impl Ratio {
    fn add(&mut self, hit: bool) {
        self.hits += hit as usize;
        self.total += 1;
    }

    fn estimate(&self) -> (f64, f64) {
        if self.total == 0 {
            return (f64::NAN, f64::NAN);
        }
        let n = self.total as f64;
        let p = self.hits as f64 / n;
        (p, Z95 * (p * (1.0 - p) / n).sqrt())
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Rms {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Rms {
    fn add(&mut self, err: f64) {
        let e2 = err * err;
        self.n += 1;
        self.sum += e2;
        self.sum_sq += e2 * e2;
    }

    fn estimate(&self) -> (f64, f64) {
        if self.n == 0 {
            return (f64::NAN, f64::NAN);
        }
        let n = self.n as f64;
        let mse = self.sum / n;
        let rmse = mse.sqrt();
        if self.n < 2 || rmse == 0.0 {
            return (rmse, 0.0);
        }
        let var = ((self.sum_sq - n * mse * mse) / (n - 1.0)).max(0.0);
        (rmse, Z95 * (var / n).sqrt() / (2.0 * rmse))
    }
}

#[derive(Debug, Default)]
struct PointStats {
    trials: usize,
    mcd_fail: Ratio,
    flm_fail: Ratio,
    cfo: Rms,
    ls_count: Ratio,
    ls_exclude: Ratio,
    rc_count: Ratio,
    rc_exclude: Ratio,
}

impl PointStats {
    fn add(&mut self, out: &TrialOutcome) {
        self.trials += 1;
        if let Some(flm) = &out.flm {
            self.flm_fail.add(!flm.correct);
        }
        let Some(mcd) = &out.mcd else { return };
        self.mcd_fail.add(!mcd.correct);
        for u in &mcd.users {
            if mcd.correct {
                if let Some(e) = u.epsilon_hat {
                    self.cfo.add(e - u.epsilon);
                }
            }
            // a missing estimate counts as an error under the count policy
            if let Some(flag) = u.ls_error {
                self.ls_exclude.add(flag);
            }
            self.ls_count.add(u.ls_error.unwrap_or(true));
            if let Some(flag) = u.rc_error {
                self.rc_exclude.add(flag);
            }
            self.rc_count.add(u.rc_error.unwrap_or(true));
        }
    }

    fn rows(&self, cfg: &ExperimentConfig, point: ScenarioPoint, out: &mut Vec<MetricsRow>) {
        let base = |detector, estimator, pf: (f64, f64), cfo: (f64, f64), count: (f64, f64), excl: (f64, f64)| {
            MetricsRow {
                snr_db: point.snr_db,
                k_users: point.k_users,
                omega_max: point.omega_max,
                detector,
                estimator,
                trials: self.trials,
                pf: pf.0,
                pf_ci95: pf.1,
                cfo_rmse: cfo.0,
                cfo_rmse_ci95: cfo.1,
                p_eps_count: count.0,
                p_eps_count_ci95: count.1,
                p_eps_exclude: excl.0,
                p_eps_exclude_ci95: excl.1,
            }
        };
        let nan = (f64::NAN, f64::NAN);
        if cfg.detector.runs_mcd() {
            let pf = self.mcd_fail.estimate();
            let cfo = self.cfo.estimate();
            if cfg.estimator.runs_ls() {
                out.push(base("mcd", "ls", pf, cfo, self.ls_count.estimate(), self.ls_exclude.estimate()));
            }
            if cfg.estimator.runs_rc() {
                out.push(base("mcd", "rc", pf, cfo, self.rc_count.estimate(), self.rc_exclude.estimate()));
            }
        }
        if cfg.detector.runs_flm() {
            out.push(base("flm", "none", self.flm_fail.estimate(), nan, nan, nan));
        }
    }
}

/// Full grid with the thread count from the config.
pub fn sweep(cfg: &ExperimentConfig) -> Result<MetricsTable> {
    sweep_with_threads(cfg, cfg.threads)
}

/// Runs every `(K, Ω)` pair for `cfg.trials` trials and evaluates each
/// trial at every SNR of the list (same users, channels and noise shape
/// across SNRs). Trials run in parallel; outcomes are collected in trial
/// order and reduced sequentially, so the table does not depend on
/// `threads` (0 = rayon default).
pub fn sweep_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<MetricsTable> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?;
    let mut table = MetricsTable::empty(cfg.timing_miss_policy);
    for &k in &cfg.k_users {
        for &omega in &cfg.omega_max {
            let per_trial: Vec<Vec<TrialOutcome>> = pool.install(|| {
                (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        let scene = TrialScene::draw(cfg, k, omega, t)?;
                        cfg.snr_db
                            .iter()
                            .map(|&snr_db| {
                                scene.evaluate(
                                    cfg,
                                    ScenarioPoint {
                                        k_users: k,
                                        omega_max: omega,
                                        snr_db,
                                    },
                                )
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (s, &snr_db) in cfg.snr_db.iter().enumerate() {
                let mut stats = PointStats::default();
                for outcomes in &per_trial {
                    stats.add(&outcomes[s]);
                }
                let point = ScenarioPoint {
                    k_users: k,
                    omega_max: omega,
                    snr_db,
                };
                stats.rows(cfg, point, &mut table.rows);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_window_edges() {
        let err = |d: i64| timing_error_event(100 + d, 100, 64, 12);
        assert!(!err(0));
        assert!(!err(26));
        assert!(err(27));
        assert!(!err(-27));
        assert!(err(-28));
        let window: Vec<i64> = (-100..100).filter(|&d| !err(d)).collect();
        assert_eq!(window.first(), Some(&-27));
        assert_eq!(window.last(), Some(&26));
        assert_eq!(window.len(), 54);
    }

    #[test]
    fn timing_window_odd_gap() {
        // L − N_GD = −51: d − 25.5 ≤ 0 and d − 25.5 ≥ −52
        let err = |d: i64| timing_error_event(d, 0, 64, 13);
        assert!(!err(25) && err(26));
        assert!(!err(-26) && err(-27));
    }

    #[test]
    fn wald_and_rmse_intervals() {
        let mut r = Ratio::default();
        for i in 0..100 {
            r.add(i < 25);
        }
        let (p, h) = r.estimate();
        assert_eq!(p, 0.25);
        assert!((h - 1.96 * (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(Ratio::default().estimate().0.is_nan());

        let mut e = Rms::default();
        for x in [1.0, -1.0, 1.0, -1.0] {
            e.add(x);
        }
        assert_eq!(e.estimate(), (1.0, 0.0));
        let mut e = Rms::default();
        e.add(3.0);
        e.add(4.0);
        let (rmse, _) = e.estimate();
        assert!((rmse - 12.5f64.sqrt()).abs() < 1e-15);
    }
}
