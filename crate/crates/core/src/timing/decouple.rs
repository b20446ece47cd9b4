use num_complex::Complex64;

use crate::airlink::{CodeBook, RangingPlan, SubchannelObservation};
use crate::error::{Error, Result};
use crate::numkit::{dft, hermitian_eig, CMatrix};
use crate::subspace::DetectionResult;

/// `C^H C` with a larger condition number is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e10;

/// One user's share of the observation after the least-squares split.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSignature {
    pub code: usize,
    /// CFO (rad/sample) used to build this user's column of `C`.
    pub omega: f64,
    pub n_subcarriers: usize,
    /// `i_{q,ν}`, indexed `[ν][q]`.
    pub bins: Vec<Vec<usize>>,
    /// `Ŝ(i_{q,ν})`, indexed `[ν][q]`.
    pub spectrum: Vec<Vec<Complex64>>,
    /// Unnormalized `Q`-point inverse DFT over `q`,
    /// `ŝ(ν, ℓ) = Σ_q Ŝ(i_{q,ν}) e^{j2πqℓ/Q}`, indexed `[ν][ℓ]`.
    pub impulse: Vec<Vec<Complex64>>,
}

impl UserSignature {
    /// Builds the inverse transforms from a per-bin spectrum.
    pub fn from_spectrum(
        code: usize,
        omega: f64,
        n_subcarriers: usize,
        bins: Vec<Vec<usize>>,
        spectrum: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if bins.len() != spectrum.len() || bins.iter().zip(&spectrum).any(|(b, s)| b.len() != s.len()) {
            return Err(Error::Dimension("bin layout does not match spectrum".into()));
        }
        let impulse = spectrum
            .iter()
            .map(|row| {
                let scale = (row.len() as f64).sqrt();
                dft(row, true).map(|v| v.into_iter().map(|z| z * scale).collect())
            })
            .collect::<Result<Vec<Vec<Complex64>>>>()?;
        Ok(Self {
            code,
            omega,
            n_subcarriers,
            bins,
            spectrum,
            impulse,
        })
    }

    pub fn q_subbands(&self) -> usize {
        self.spectrum.first().map_or(0, Vec::len)
    }

    pub fn v_per_subband(&self) -> usize {
        self.spectrum.len()
    }

    /// `ŝ(ν, ℓ mod Q)`.
    pub(crate) fn impulse_at(&self, nu: usize, l: usize) -> Complex64 {
        let row = &self.impulse[nu];
        row[l % row.len()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoupledSignatures {
    pub users: Vec<UserSignature>,
}

impl DecoupledSignatures {
    pub fn user(&self, code: usize) -> Option<&UserSignature> {
        self.users.iter().find(|u| u.code == code)
    }
}

/// Separates the detected users: `Ŝ(i) = (C^H C)^{-1} C^H Y(i)` with
/// `C = [Γ(ω̂_1)c_1 … Γ(ω̂_K)c_K]`.
pub fn decouple_signatures(
    obs: &SubchannelObservation,
    detection: &DetectionResult,
    codebook: &CodeBook,
    plan: &RangingPlan,
) -> Result<DecoupledSignatures> {
    let users: Vec<(usize, f64)> = detection.detected.iter().map(|c| (c.code, c.omega)).collect();
    decouple_with(obs, &users, codebook, plan)
}

/// As [`decouple_signatures`] for explicit `(code, ω̂)` pairs.
pub fn decouple_with(
    obs: &SubchannelObservation,
    users: &[(usize, f64)],
    codebook: &CodeBook,
    plan: &RangingPlan,
) -> Result<DecoupledSignatures> {
    if users.is_empty() {
        return Err(Error::Contract("decoupling needs at least one detected code".into()));
    }
    let m = obs.blocks();
    let k = users.len();
    let block_len = plan.block_len() as f64;

    let mut c = CMatrix::zeros(m, k);
    for (col, &(code, omega)) in users.iter().enumerate() {
        let code_vec = codebook.code(code)?;
        if code_vec.len() != m {
            return Err(Error::Dimension(format!("code length {} for {m} blocks", code_vec.len())));
        }
        for (row, &cm) in code_vec.iter().enumerate() {
            c[(row, col)] = cm * Complex64::from_polar(1.0, row as f64 * omega * block_len);
        }
    }
    let ch = c.conj_transpose();
    let gram = ch.matmul(&c)?;
    let eig = hermitian_eig(&gram)?;
    let smallest = eig.values[k - 1];
    let condition = if smallest > 0.0 { eig.values[0] / smallest } else { f64::INFINITY };
    if condition > CONDITION_LIMIT {
        let (a, b) = most_collinear(&c);
        return Err(Error::Decoupling {
            code_a: users[a].0,
            code_b: users[b].0,
            condition,
        });
    }
    let inverse = CMatrix::from_fn(k, k, |a, b| {
        (0..k)
            .map(|j| eig.vectors[(a, j)] * eig.vectors[(b, j)].conj() / eig.values[j])
            .sum()
    });
    let pinv = inverse.matmul(&ch)?;

    let qn = obs.q_subbands;
    let vn = obs.v_per_subband;
    let bins_flat = plan.subchannel_bins(obs.subchannel)?;
    let bins: Vec<Vec<usize>> = (0..vn)
        .map(|nu| (0..qn).map(|q| bins_flat[q * vn + nu]).collect())
        .collect();

    let mut spectra = vec![vec![vec![Complex64::new(0.0, 0.0); qn]; vn]; k];
    for q in 0..qn {
        for nu in 0..vn {
            let s = pinv.mul_vec(&obs.bin_vector_at(q, nu))?;
            for (u, v) in s.into_iter().enumerate() {
                spectra[u][nu][q] = v;
            }
        }
    }

    let users = users
        .iter()
        .zip(spectra)
        .map(|(&(code, omega), spectrum)| {
            UserSignature::from_spectrum(code, omega, plan.n_subcarriers, bins.clone(), spectrum)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecoupledSignatures { users })
}

fn most_collinear(c: &CMatrix) -> (usize, usize) {
    let k = c.cols();
    let cols: Vec<Vec<Complex64>> = (0..k).map(|j| c.column(j)).collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = (0, k.min(2) - 1);
    let mut best_cos = -1.0;
    for a in 0..k {
        for b in a + 1..k {
            let ip: Complex64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x.conj() * y).sum();
            let cos = ip.norm() / (norm(&cols[a]) * norm(&cols[b]));
            if cos > best_cos {
                best_cos = cos;
                best = (a, b);
            }
        }
    }
    best
}
