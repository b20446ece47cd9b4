use ranging_core::harness::{
    emit_config, emit_outputs, format_csv, parse_config, run_trial, sweep, sweep_with_threads, DetectorChoice,
    ExperimentConfig, MissPolicy, OutputPaths, ScenarioPoint, TrialOutcome, CSV_HEADER,
};
use ranging_core::Error;

fn point(k_users: usize, omega_max: f64, snr_db: f64) -> ScenarioPoint {
    ScenarioPoint {
        k_users,
        omega_max,
        snr_db,
    }
}

#[test]
fn noiseless_single_user_trial_is_exact() {
    let cfg = ExperimentConfig::new(vec![f64::INFINITY], 1);
    for trial in 0..10 {
        let out = run_trial(&cfg, point(1, 0.0, f64::INFINITY), trial).unwrap();
        let mcd = out.mcd.unwrap();
        assert!(mcd.correct, "trial {trial}: {:?} vs {:?}", mcd.detected, out.true_codes);
        let u = &mcd.users[0];
        assert_eq!(u.theta_ls, Some(u.theta));
        assert_eq!(u.theta_rc, Some(u.theta));
        assert!(u.epsilon_hat.unwrap().abs() < 1e-3);
        assert_eq!(u.ls_error, Some(false));
        // no threshold exists without noise
        assert!(out.flm.is_none());
    }
}

#[test]
fn trials_are_reproducible() {
    let cfg = ExperimentConfig::new(vec![8.0], 1);
    let p = point(3, 0.075, 8.0);
    for trial in [0, 5, 1234] {
        assert_eq!(run_trial(&cfg, p, trial).unwrap(), run_trial(&cfg, p, trial).unwrap());
    }
    let a = run_trial(&cfg, p, 0).unwrap();
    let b = run_trial(&cfg, p, 1).unwrap();
    assert_ne!(a.mcd.unwrap().users, b.mcd.unwrap().users);
}

#[test]
fn trial_draws_follow_the_config() {
    let cfg = ExperimentConfig::new(vec![20.0], 1);
    for trial in 0..50 {
        let out = run_trial(&cfg, point(3, 0.05, 20.0), trial).unwrap();
        assert_eq!(out.true_codes.len(), 3);
        assert!(out.true_codes.windows(2).all(|w| w[0] < w[1]));
        assert!(out.true_codes.iter().all(|&c| (1..=3).contains(&c)));
        for u in &out.mcd.unwrap().users {
            assert!(u.theta <= 204);
            assert!(u.epsilon.abs() <= 0.05);
        }
    }
}

#[test]
fn invalid_point_rejected() {
    let cfg = ExperimentConfig::new(vec![0.0], 1);
    assert!(run_trial(&cfg, point(4, 0.05, 0.0), 0).is_err());
    assert!(run_trial(&cfg, point(1, -0.1, 0.0), 0).is_err());
}

#[derive(Debug, PartialEq)]
struct Summary {
    mcd_failures: usize,
    flm_failures: usize,
    ls_errors: usize,
    rc_errors: usize,
    theta_ls_sum: usize,
    theta_rc_sum: usize,
    order_sum: usize,
}

fn summarize(outcomes: &[TrialOutcome]) -> Summary {
    let mut s = Summary {
        mcd_failures: 0,
        flm_failures: 0,
        ls_errors: 0,
        rc_errors: 0,
        theta_ls_sum: 0,
        theta_rc_sum: 0,
        order_sum: 0,
    };
    for o in outcomes {
        let mcd = o.mcd.as_ref().unwrap();
        s.mcd_failures += !mcd.correct as usize;
        s.flm_failures += !o.flm.as_ref().unwrap().correct as usize;
        s.order_sum += mcd.order;
        for u in &mcd.users {
            s.ls_errors += u.ls_error.unwrap_or(true) as usize;
            s.rc_errors += u.rc_error.unwrap_or(true) as usize;
            s.theta_ls_sum += u.theta_ls.unwrap_or(0);
            s.theta_rc_sum += u.theta_rc.unwrap_or(0);
        }
    }
    s
}

/// Self-generated fixture: reference plan, K = 2, Ω = 0.05, 12 dB, seed
/// 2024, trials 0..100. Any change to the random streams or estimators
/// shows up here.
#[test]
fn reference_regression_fixture() {
    let mut cfg = ExperimentConfig::new(vec![12.0], 100);
    cfg.seed = 2024;
    let outcomes: Vec<TrialOutcome> =
        (0..100).map(|t| run_trial(&cfg, point(2, 0.05, 12.0), t).unwrap()).collect();
    assert_eq!(
        summarize(&outcomes),
        Summary {
            mcd_failures: 0,
            flm_failures: 39,
            ls_errors: 0,
            rc_errors: 0,
            theta_ls_sum: 21529,
            theta_rc_sum: 21528,
            order_sum: 200,
        }
    );
}

#[test]
fn noiseless_rows_are_perfect() {
    let mut cfg = ExperimentConfig::new(vec![f64::INFINITY], 30);
    cfg.k_users = vec![1, 2, 3];
    cfg.omega_max = vec![0.0, 0.05, 0.075];
    cfg.detector = DetectorChoice::Mcd;
    let table = sweep(&cfg).unwrap();
    assert_eq!(table.rows.len(), 3 * 3 * 2);
    for row in &table.rows {
        assert_eq!(row.pf, 0.0, "{row:?}");
        assert_eq!(row.p_eps_count, 0.0, "{row:?}");
        assert_eq!(row.p_eps_exclude, 0.0, "{row:?}");
        assert!(row.cfo_rmse < 1e-3, "{row:?}");
        assert_eq!(row.trials, 30);
    }
}

#[test]
fn sweep_independent_of_thread_count() {
    let cfg = parse_config("snr_db = 0,10,20\ntrials = 40\nk_users = 2,3\nomega_max = 0.075\nseed = 5\n").unwrap();
    let one = format_csv(&sweep_with_threads(&cfg, 1).unwrap());
    let four = format_csv(&sweep_with_threads(&cfg, 4).unwrap());
    assert_eq!(one, four);
    assert!(one.starts_with(CSV_HEADER));
    // 2 K values × 1 Ω × 3 SNRs × (ls, rc, flm)
    assert_eq!(one.lines().count(), 1 + 18);
}

#[test]
fn miss_policies_bracket() {
    let mut cfg = ExperimentConfig::new(vec![0.0], 100);
    cfg.k_users = vec![3];
    cfg.omega_max = vec![0.075];
    cfg.detector = DetectorChoice::Mcd;
    let table = sweep(&cfg).unwrap();
    for row in &table.rows {
        assert!(row.pf > 0.0);
        // missed users only add errors under the count policy
        assert!(row.p_eps_count >= row.p_eps_exclude, "{row:?}");
        for p in [row.pf, row.p_eps_count, row.p_eps_exclude] {
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn outputs_written_and_config_echoed() {
    let dir = std::env::temp_dir().join(format!("ranging-harness-{}", std::process::id()));
    let cfg = parse_config("snr_db = 10\ntrials = 5\ntiming_miss_policy = exclude\n").unwrap();
    let table = sweep(&cfg).unwrap();
    assert_eq!(table.policy, MissPolicy::Exclude);
    let paths = OutputPaths::in_dir(&dir);
    emit_outputs(&table, &paths).unwrap();
    emit_config(&cfg, &paths).unwrap();
    let csv = std::fs::read_to_string(&paths.csv).unwrap();
    assert_eq!(csv, format_csv(&table));
    let echoed = std::fs::read_to_string(&paths.config).unwrap();
    assert_eq!(parse_config(&echoed).unwrap(), cfg);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unwritable_output_reports_path() {
    let table = sweep(&parse_config("snr_db = 10\ntrials = 1\n").unwrap()).unwrap();
    let blocker = std::env::temp_dir().join(format!("ranging-blocker-{}", std::process::id()));
    std::fs::write(&blocker, "x").unwrap();
    let err = emit_outputs(&table, &OutputPaths::in_dir(blocker.join("sub"))).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("ranging-blocker"), "{err}");
    std::fs::remove_file(&blocker).unwrap();
}
