use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::ComplexVector;
use crate::error::{Error, Result};

/// A reproducible random stream keyed by `(seed, stream)`.
///
/// Backed by ChaCha12 with the stream id in the nonce, so distinct ids
/// give independent sequences and no stream depends on the draw order of
/// another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub seed: u64,
    pub stream: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// `n` i.i.d. circularly symmetric complex Gaussians with total variance
/// `variance` per entry.
pub fn sample_cgaussian(stream: SeededStream, n: usize, variance: f64) -> Result<ComplexVector> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Parameter(format!("variance must be positive, got {variance}")));
    }
    let mut rng = stream.rng();
    Ok(draw_cgaussian(&mut rng, n, variance))
}

pub(crate) fn draw_cgaussian<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, variance: f64) -> ComplexVector {
    let sd = (variance / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(sd * re, sd * im)
        })
        .collect()
}
