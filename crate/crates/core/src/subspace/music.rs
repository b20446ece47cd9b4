use std::f64::consts::PI;

use num_complex::Complex64;

use crate::airlink::RangingPlan;
use crate::error::{Error, Result};
use crate::numkit::EigenDecomposition;

/// Lower bound on the pseudospectrum denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Eigenvectors spanning the estimated noise subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSubspace {
    pub order: usize,
    pub eigenvalues: Vec<f64>,
    /// `s_{K̂+1} … s_M`.
    pub vectors: Vec<Vec<Complex64>>,
}

impl NoiseSubspace {
    pub fn from_eigen(eig: &EigenDecomposition, order: usize) -> Result<Self> {
        if order >= eig.dim() {
            return Err(Error::NoNoiseSubspace { order });
        }
        Ok(Self {
            order,
            eigenvalues: eig.values.clone(),
            vectors: (order..eig.dim()).map(|m| eig.vector(m)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Search window for the CFO, in units of the subcarrier spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoSearch {
    /// Largest `|ε̃|` searched.
    pub bound: f64,
    /// Grid step in `ε̃`.
    pub step: f64,
    /// Parabolic interpolation of `ln Ψ` around the best grid point.
    pub refine: bool,
}

impl CfoSearch {
    pub const DEFAULT_STEP: f64 = 2e-4;
    /// Ratio of the search bound to the largest CFO expected.
    pub const DEFAULT_MARGIN: f64 = 1.5;

    /// Default search for CFOs up to `omega_max` in magnitude.
    pub fn for_max_cfo(omega_max: f64) -> Self {
        Self {
            bound: Self::DEFAULT_MARGIN * omega_max,
            step: Self::DEFAULT_STEP,
            refine: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.bound > 0.0) || !(self.step > 0.0) || !self.bound.is_finite() {
            return Err(Error::Parameter(format!(
                "CFO search needs positive bound and step, got bound {} step {}",
                self.bound, self.step
            )));
        }
        Ok(())
    }

    /// Grid points `i·step`, `|i·step| ≤ bound`.
    pub fn grid(&self) -> Vec<f64> {
        let half = (self.bound / self.step + 1e-9).floor() as i64;
        (-half..=half).map(|i| i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoEstimate {
    /// Radians per sample.
    pub omega: f64,
    /// Fraction of the subcarrier spacing.
    pub epsilon: f64,
    pub peak: f64,
}

/// `Ψ(ω̃) = 1 / Σ_m |c^H Γ^H(ω̃) s_m|²`, with
/// `Γ(ω̃) = diag{e^{jmω̃N_T}}` and the sum over noise eigenvectors.
pub fn music_spectrum(code: &[Complex64], noise: &NoiseSubspace, omega: f64, plan: &RangingPlan) -> Result<f64> {
    check_dims(code, noise)?;
    let weights = projection_weights(code, noise);
    let steer = steering(omega * plan.block_len() as f64, code.len());
    Ok(pseudospectrum(&weights, &steer))
}

/// Grid search of `Ψ` over `ε̃ ∈ [−bound, bound]`, optionally refined.
pub fn estimate_cfo(
    code: &[Complex64],
    noise: &NoiseSubspace,
    search: &CfoSearch,
    plan: &RangingPlan,
) -> Result<CfoEstimate> {
    check_dims(code, noise)?;
    let grid = SteeringGrid::new(search, plan, code.len())?;
    Ok(grid.peak(&projection_weights(code, noise)))
}

fn check_dims(code: &[Complex64], noise: &NoiseSubspace) -> Result<()> {
    if noise.vectors.is_empty() {
        return Err(Error::NoNoiseSubspace { order: noise.order });
    }
    if noise.vectors.iter().any(|v| v.len() != code.len()) {
        return Err(Error::Dimension(format!(
            "code of length {} against eigenvectors of length {}",
            code.len(),
            noise.vectors[0].len()
        )));
    }
    Ok(())
}

/// Entries `conj(c(m)) s(m)` for each noise vector; the projection at `ω̃`
/// is their sum weighted by `e^{−jmω̃N_T}`.
pub(crate) fn projection_weights(code: &[Complex64], noise: &NoiseSubspace) -> Vec<Vec<Complex64>> {
    noise
        .vectors
        .iter()
        .map(|s| code.iter().zip(s).map(|(c, v)| c.conj() * v).collect())
        .collect()
}

/// `e^{−jm·phase}` for `m = 0..len`.
fn steering(phase_per_block: f64, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|m| Complex64::from_polar(1.0, -(m as f64) * phase_per_block))
        .collect()
}

fn pseudospectrum(weights: &[Vec<Complex64>], steer: &[Complex64]) -> f64 {
    let denom: f64 = weights
        .iter()
        .map(|w| w.iter().zip(steer).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr())
        .sum();
    1.0 / denom.max(DENOMINATOR_FLOOR)
}

/// Precomputed steering vectors on the search grid.
pub(crate) struct SteeringGrid {
    search: CfoSearch,
    epsilons: Vec<f64>,
    steer: Vec<Vec<Complex64>>,
    /// `ω̃N_T` per unit of `ε̃`.
    phase_per_epsilon: f64,
    omega_per_epsilon: f64,
    len: usize,
}

impl SteeringGrid {
    pub(crate) fn new(search: &CfoSearch, plan: &RangingPlan, len: usize) -> Result<Self> {
        search.validate()?;
        let omega_per_epsilon = 2.0 * PI / plan.n_subcarriers as f64;
        let phase_per_epsilon = omega_per_epsilon * plan.block_len() as f64;
        let epsilons = search.grid();
        let steer = epsilons
            .iter()
            .map(|&e| steering(e * phase_per_epsilon, len))
            .collect();
        Ok(Self {
            search: *search,
            epsilons,
            steer,
            phase_per_epsilon,
            omega_per_epsilon,
            len,
        })
    }

    pub(crate) fn peak(&self, weights: &[Vec<Complex64>]) -> CfoEstimate {
        let values: Vec<f64> = self.steer.iter().map(|s| pseudospectrum(weights, s)).collect();
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        let mut epsilon = self.epsilons[best];
        let mut peak = values[best];

        if self.search.refine && best > 0 && best + 1 < values.len() {
            let (lo, mid, hi) = (values[best - 1].ln(), values[best].ln(), values[best + 1].ln());
            let curvature = lo - 2.0 * mid + hi;
            if curvature < 0.0 {
                let delta = (0.5 * (lo - hi) / curvature).clamp(-0.5, 0.5);
                let refined = (epsilon + delta * self.search.step).clamp(-self.search.bound, self.search.bound);
                let value = pseudospectrum(weights, &steering(refined * self.phase_per_epsilon, self.len));
                if value >= peak {
                    epsilon = refined;
                    peak = value;
                }
            }
        }
        CfoEstimate {
            omega: epsilon * self.omega_per_epsilon,
            epsilon,
            peak,
        }
    }
}
