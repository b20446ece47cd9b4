//! `ranging` — Monte Carlo driver for the ranging simulator.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error,
//! 3 selftest failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ranging_core::harness::{
    emit_config, emit_outputs, format_csv, parse_config, run_selftest, run_trial, sweep, ExperimentConfig,
    MetricsTable, OutputPaths, ScenarioPoint, TrialOutcome,
};
use ranging_core::Error;

#[derive(Parser)]
#[command(name = "ranging", version, about = "OFDMA initial-ranging Monte Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (`key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overrides the config
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trials per point, overrides the config
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads (0 = all cores), overrides the config
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the first point of the grid and print every trial
    Run,
    /// Run the full grid and write CSV, plot script and resolved config
    Sweep,
    /// Quick oracle and identity checks
    Selftest,
}

enum Failure {
    Config(String),
    Runtime(String),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| match e {
        Error::Config { line, message } => Failure::Config(format!("{}:{line}: {message}", path.display())),
        other => Failure::from(other),
    })?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn describe(o: &TrialOutcome) -> String {
    let mut line = format!("trial {:>5} true {:?}", o.trial, o.true_codes);
    if let Some(mcd) = &o.mcd {
        line += &format!(" | mcd K̂={} {:?} {}", mcd.order, mcd.detected, if mcd.correct { "ok" } else { "FAIL" });
        for u in &mcd.users {
            line += &format!(" | code {} ε {:+.4}", u.code, u.epsilon);
            if let Some(e) = u.epsilon_hat {
                line += &format!(" ε̂ {e:+.4}");
            }
            line += &format!(" θ {}", u.theta);
            if let Some(t) = u.theta_ls {
                line += &format!(" ls {t}");
            }
            if let Some(t) = u.theta_rc {
                line += &format!(" rc {t}");
            }
        }
    }
    if let Some(flm) = &o.flm {
        line += &format!(" | flm {:?} {}", flm.detected, if flm.correct { "ok" } else { "FAIL" });
    }
    line
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = load(cli)?;
    cfg.k_users.truncate(1);
    cfg.omega_max.truncate(1);
    cfg.snr_db.truncate(1);
    let point = ScenarioPoint {
        k_users: cfg.k_users[0],
        omega_max: cfg.omega_max[0],
        snr_db: cfg.snr_db[0],
    };
    println!("point K={} Ω={} SNR={} dB, {} trials", point.k_users, point.omega_max, point.snr_db, cfg.trials);
    for trial in 0..cfg.trials as u64 {
        println!("{}", describe(&run_trial(&cfg, point, trial)?));
    }
    print!("{}", format_csv(&sweep(&cfg)?));
    Ok(())
}

fn run_sweep(cli: &Cli) -> Result<(), Failure> {
    let cfg = load(cli)?;
    let paths = OutputPaths::in_dir(&cfg.out_dir);
    emit_config(&cfg, &paths)?;
    let table: MetricsTable = sweep(&cfg)?;
    emit_outputs(&table, &paths)?;
    println!("{} rows -> {}", table.rows.len(), paths.csv.display());
    Ok(())
}

fn selftest(cli: &Cli) -> Result<(), Failure> {
    let checks = run_selftest(cli.seed.unwrap_or(1))?;
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Selftest)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run => run(&cli),
        Command::Sweep => run_sweep(&cli),
        Command::Selftest => selftest(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Selftest) => {
            eprintln!("selftest failed");
            ExitCode::from(3)
        }
    }
}
