use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, MissPolicy};
use super::metrics::{MetricsRow, MetricsTable};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "snr_db,k_users,omega_max,detector,estimator,trials,pf,pf_ci95,cfo_rmse,cfo_rmse_ci95,p_eps,p_eps_ci95";

/// Files written by a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub dir: PathBuf,
    /// Metrics with `p_eps` under the configured miss policy.
    pub csv: PathBuf,
    /// Same metrics with `p_eps` under the other policy.
    pub csv_alt_policy: PathBuf,
    pub plot_script: PathBuf,
    pub config: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref().to_path_buf();
        Self {
            csv: dir.join("metrics.csv"),
            csv_alt_policy: dir.join("metrics_alt_policy.csv"),
            plot_script: dir.join("plot_curves.py"),
            config: dir.join("resolved_config.txt"),
            dir,
        }
    }
}

// 9 significant digits, fixed exponent style.
fn metric(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.8e}")
    }
}

fn row_line(row: &MetricsRow, policy: MissPolicy) -> String {
    let (p_eps, p_eps_ci) = row.p_eps(policy);
    let snr = if row.snr_db == f64::INFINITY { "inf".to_string() } else { row.snr_db.to_string() };
    format!(
        "{snr},{},{},{},{},{},{},{},{},{},{},{}",
        row.k_users,
        row.omega_max,
        row.detector,
        row.estimator,
        row.trials,
        metric(row.pf),
        metric(row.pf_ci95),
        metric(row.cfo_rmse),
        metric(row.cfo_rmse_ci95),
        metric(p_eps),
        metric(p_eps_ci),
    )
}

/// CSV text under the table's own miss policy.
pub fn format_csv(table: &MetricsTable) -> String {
    format_csv_with(table, table.policy)
}

fn format_csv_with(table: &MetricsTable, policy: MissPolicy) -> String {
    let mut s = String::with_capacity(64 * (table.rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for row in &table.rows {
        let _ = writeln!(s, "{}", row_line(row, policy));
    }
    s
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes both CSV variants and the plot script.
pub fn emit_outputs(table: &MetricsTable, paths: &OutputPaths) -> Result<()> {
    ensure_dir(&paths.dir)?;
    let alt = match table.policy {
        MissPolicy::Count => MissPolicy::Exclude,
        MissPolicy::Exclude => MissPolicy::Count,
    };
    write(&paths.csv, &format_csv(table))?;
    write(&paths.csv_alt_policy, &format_csv_with(table, alt))?;
    write(&paths.plot_script, PLOT_SCRIPT)
}

/// Echoes the fully resolved configuration next to the results.
pub fn emit_config(cfg: &ExperimentConfig, paths: &OutputPaths) -> Result<()> {
    ensure_dir(&paths.dir)?;
    write(&paths.config, &cfg.to_text())
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Draws the sweep curves from metrics.csv (log-scale probabilities).

usage: python3 plot_curves.py [metrics.csv]
"""
import csv
import os
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(os.path.abspath(__file__)), "metrics.csv")
out_dir = os.path.dirname(os.path.abspath(path))
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))


def curves(value, keep):
    series = defaultdict(list)
    for r in rows:
        if not keep(r):
            continue
        y, ci = float(r[value]), float(r[value + "_ci95"])
        if y != y:
            continue
        label = "%s/%s K=%s Ω=%s" % (r["detector"], r["estimator"], r["k_users"], r["omega_max"])
        series[label].append((float(r["snr_db"]), y, ci))
    return series


def draw(value, keep, ylabel, name):
    series = curves(value, keep)
    if not series:
        return
    fig, ax = plt.subplots()
    for label, pts in sorted(series.items()):
        pts.sort()
        x = [p[0] for p in pts]
        y = [max(p[1], 1e-6) for p in pts]
        # clip the lower bar so it stays on the log axis
        lower = [min(p[2], 0.9 * v) for p, v in zip(pts, y)]
        ax.errorbar(x, y, yerr=[lower, [p[2] for p in pts]], marker="o", capsize=3, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.savefig(os.path.join(out_dir, name), dpi=150, bbox_inches="tight")
    plt.close(fig)


# pf is shared by all estimators of a detector; keep one row per detector
draw("pf", lambda r: r["estimator"] in ("none", "ls") or (r["estimator"] == "rc" and not any(
    q["estimator"] == "ls" and q["detector"] == r["detector"] for q in rows)), "P_f", "pf.png")
draw("cfo_rmse", lambda r: r["detector"] == "mcd", "CFO RMSE (normalized ε)", "cfo_rmse.png")
draw("p_eps", lambda r: r["detector"] == "mcd", "P(ε)", "p_eps.png")
"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> MetricsRow {
        MetricsRow {
            snr_db: 12.0,
            k_users: 2,
            omega_max: 0.05,
            detector: "mcd",
            estimator: "rc",
            trials: 100,
            pf: 0.03,
            pf_ci95: 0.0334,
            cfo_rmse: 1.2345678912e-3,
            cfo_rmse_ci95: 1e-4,
            p_eps_count: 0.05,
            p_eps_count_ci95: 0.01,
            p_eps_exclude: 0.0,
            p_eps_exclude_ci95: 0.0,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = format_csv(&MetricsTable::empty(MissPolicy::Count));
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_in_schema_order() {
        let table = MetricsTable {
            rows: vec![row()],
            policy: MissPolicy::Count,
        };
        let csv = format_csv(&table);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "12,2,0.05,mcd,rc,100,3.00000000e-2,3.34000000e-2,1.23456789e-3,1.00000000e-4,5.00000000e-2,1.00000000e-2"
        );
        assert_eq!(lines[1].split(',').count(), CSV_HEADER.split(',').count());
        let alt = format_csv_with(&table, MissPolicy::Exclude);
        assert!(alt.lines().nth(1).unwrap().ends_with("0.00000000e0,0.00000000e0"));
    }

    #[test]
    fn nan_and_infinite_snr() {
        let mut r = row();
        r.snr_db = f64::INFINITY;
        r.cfo_rmse = f64::NAN;
        let line = row_line(&r, MissPolicy::Count);
        assert!(line.starts_with("inf,"));
        assert!(line.contains(",nan,"));
    }

    #[test]
    fn emission_is_byte_stable() {
        let dir = std::env::temp_dir().join(format!("ranging-out-{}", std::process::id()));
        let paths = OutputPaths::in_dir(&dir);
        let table = MetricsTable {
            rows: vec![row(), row()],
            policy: MissPolicy::Count,
        };
        emit_outputs(&table, &paths).unwrap();
        let first = fs::read(&paths.csv).unwrap();
        emit_outputs(&table, &paths).unwrap();
        assert_eq!(first, fs::read(&paths.csv).unwrap());
        assert!(paths.plot_script.exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
