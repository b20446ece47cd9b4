use crate::airlink::SubchannelObservation;
use crate::error::{Error, Result};
use crate::numkit::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    /// `R̂ = (1/QV) Σ Y(i) Y(i)^H`.
    pub r_hat: CMatrix,
    /// `R̃ = (R̂ + J R̂^T J)/2`.
    pub r_tilde: CMatrix,
    pub snapshots: usize,
}

pub fn sample_correlation(obs: &SubchannelObservation) -> Result<CorrelationEstimate> {
    let snapshots = obs.snapshots();
    if snapshots == 0 {
        return Err(Error::EmptyObservation);
    }
    let m = obs.blocks();
    let y = &obs.data;
    let mut r_hat = CMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for c in 0..snapshots {
                acc += y[(a, c)] * y[(b, c)].conj();
            }
            acc /= snapshots as f64;
            r_hat[(a, b)] = acc;
            r_hat[(b, a)] = acc.conj();
        }
        r_hat[(a, a)].im = 0.0;
    }
    let r_tilde = forward_backward(&r_hat);
    Ok(CorrelationEstimate {
        r_hat,
        r_tilde,
        snapshots,
    })
}

/// `(R + J R^T J)/2`; entry `(a, b)` pairs with `(M−1−b, M−1−a)`.
pub(crate) fn forward_backward(r: &CMatrix) -> CMatrix {
    let m = r.rows();
    CMatrix::from_fn(m, m, |a, b| (r[(a, b)] + r[(m - 1 - b, m - 1 - a)]) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{sample_cgaussian, SeededStream};

    fn exchange(m: usize) -> CMatrix {
        CMatrix::from_fn(m, m, |a, b| {
            if a + b == m - 1 {
                num_complex::Complex64::new(1.0, 0.0)
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn fb_matches_matrix_definition_and_is_persymmetric() {
        let g = sample_cgaussian(SeededStream::new(4, 4), 16, 1.0).unwrap();
        let g = CMatrix::from_row_major(4, 4, g).unwrap();
        let r = g.matmul(&g.conj_transpose()).unwrap();
        let j = exchange(4);
        let jrtj = j.matmul(&r.transpose()).unwrap().matmul(&j).unwrap();
        let expect = CMatrix::from_fn(4, 4, |a, b| (r[(a, b)] + jrtj[(a, b)]) * 0.5);
        let fb = forward_backward(&r);
        assert!(fb.sub(&expect).unwrap().frobenius_norm() < 1e-14);

        let back = j.matmul(&fb.transpose()).unwrap().matmul(&j).unwrap();
        assert_eq!(back, fb);
        assert!(fb.hermitian_defect() < 1e-15);
    }

    #[test]
    fn empty_observation_rejected() {
        let obs = SubchannelObservation::new(0, 0, 2, CMatrix::zeros(4, 0)).unwrap();
        assert!(matches!(sample_correlation(&obs), Err(Error::EmptyObservation)));
    }
}
