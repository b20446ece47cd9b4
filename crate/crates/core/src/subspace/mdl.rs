use crate::error::{Error, Result};

/// Eigenvalues are clamped to this before logarithms.
pub const EIGENVALUE_FLOOR: f64 = 1e-15;

/// MDL cost `F(K̃) = ½K̃(2M−K̃)ln(QV) − QV(M−K̃)ln ρ(K̃)`, where `ρ(K̃)` is the
/// geometric-to-arithmetic mean ratio of the `M−K̃` smallest eigenvalues.
pub fn mdl_metric(eigenvalues: &[f64], snapshots: usize, order: usize) -> f64 {
    let m = eigenvalues.len();
    let tail: Vec<f64> = eigenvalues[order..].iter().map(|&l| l.max(EIGENVALUE_FLOOR)).collect();
    let count = tail.len() as f64;
    let mean_log = tail.iter().map(|l| l.ln()).sum::<f64>() / count;
    let log_mean = (tail.iter().sum::<f64>() / count).ln();
    let ln_rho = (mean_log - log_mean).min(0.0);
    let k = order as f64;
    let qv = snapshots as f64;
    0.5 * k * (2.0 * m as f64 - k) * qv.ln() - qv * (m as f64 - k) * ln_rho
}

/// Order minimizing [`mdl_metric`] over `0..M`; ties go to the smaller order.
pub fn mdl_order(eigenvalues: &[f64], snapshots: usize, m: usize) -> Result<usize> {
    if eigenvalues.len() != m || m == 0 {
        return Err(Error::Contract(format!("expected {m} eigenvalues, got {}", eigenvalues.len())));
    }
    if eigenvalues.iter().any(|l| l.is_nan()) {
        return Err(Error::Contract("NaN eigenvalue".into()));
    }
    if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Contract("eigenvalues must be sorted non-increasing".into()));
    }
    if snapshots == 0 {
        return Err(Error::EmptyObservation);
    }
    let mut best = 0;
    let mut best_cost = mdl_metric(eigenvalues, snapshots, 0);
    for order in 1..m {
        let cost = mdl_metric(eigenvalues, snapshots, order);
        if cost < best_cost {
            best = order;
            best_cost = cost;
        }
    }
    Ok(best)
}
