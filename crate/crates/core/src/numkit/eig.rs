use num_complex::Complex64;

use super::matrix::{CMatrix, ComplexVector};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Eigenpairs of a Hermitian matrix, eigenvalues non-increasing.
///
/// Column `m` of `vectors` belongs to `values[m]`. Each column has unit
/// norm and its largest-magnitude entry is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, m: usize) -> ComplexVector {
        self.vectors.column(m)
    }

    /// `U Λ U^H`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|m| self.vectors[(i, m)] * self.values[m] * self.vectors[(j, m)].conj())
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// The input is symmetrized as `(A + A^H)/2` first. Sweeps stop once the
/// off-diagonal Frobenius norm falls below `1e-12·‖A‖_F`.
pub fn hermitian_eig(a: &CMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut work = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    for i in 0..n {
        work[(i, i)].im = 0.0;
    }
    let mut vecs = CMatrix::identity(n);
    let tol = RELATIVE_TOLERANCE * work.frobenius_norm();

    let mut converged = false;
    let mut residual = off_diagonal_norm(&work);
    for _ in 0..MAX_SWEEPS {
        if residual <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
        residual = off_diagonal_norm(&work);
    }
    if !converged && residual > tol {
        return Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(j, j)].re.total_cmp(&work[(i, i)].re));

    let values = order.iter().map(|&i| work[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vecs.column(src);
        fix_phase(&mut col);
        for (i, v) in col.into_iter().enumerate() {
            vectors[(i, dst)] = v;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `W = diag(1, e^{-jφ})·R(c, s)`
/// acting on the (p, q) plane, then accumulates `V ← V W`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * b);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let w_pp = Complex64::new(c, 0.0);
    let w_pq = Complex64::new(s, 0.0);
    let w_qp = -phase.conj() * s;
    let w_qq = phase.conj() * c;

    let n = a.rows();
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * w_pp + aiq * w_qp;
        a[(i, q)] = aip * w_pq + aiq * w_qq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = w_pp.conj() * apj + w_qp.conj() * aqj;
        a[(q, j)] = w_pq.conj() * apj + w_qq.conj() * aqj;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * w_pp + viq * w_qp;
        v[(i, q)] = vip * w_pq + viq * w_qq;
    }
}

fn fix_phase(col: &mut [Complex64]) {
    let mut best = 0;
    for (i, z) in col.iter().enumerate() {
        if z.norm() > col[best].norm() {
            best = i;
        }
    }
    let pivot = col[best];
    let mag = pivot.norm();
    if mag == 0.0 {
        return;
    }
    let rot = pivot.conj() / mag;
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in col.iter_mut() {
        *z = *z * rot / norm;
    }
    col[best].im = 0.0;
}
