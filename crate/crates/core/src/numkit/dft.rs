use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unitary DFT: `X[k] = N^{-1/2} Σ x[n] e^{∓j2πnk/N}`, the sign set by
/// `inverse`. Only power-of-two lengths are supported.
pub fn dft(x: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    let mut out = x.to_vec();
    dft_in_place(&mut out, inverse)?;
    Ok(out)
}

/// In-place variant of [`dft`].
pub fn dft_in_place(x: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = x.len();
    if !n.is_power_of_two() {
        return Err(Error::Sizing(n));
    }
    if n == 1 {
        return Ok(());
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            x.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64))
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = x[start + k];
                let b = x[start + k + half] * w;
                x[start + k] = a + b;
                x[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }

    let norm = 1.0 / (n as f64).sqrt();
    for v in x.iter_mut() {
        *v *= norm;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{sample_cgaussian, SeededStream};

    fn energy(x: &[Complex64]) -> f64 {
        x.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Textbook O(N²) evaluation of the unitary DFT.
    fn direct_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(m, v)| {
                        v * Complex64::from_polar(1.0, sign * 2.0 * PI * ((m * k) % n) as f64 / n as f64)
                    })
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn impulse_maps_to_constant() {
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[0] = Complex64::new(1.0, 0.0);
        let y = dft(&x, false).unwrap();
        for v in y {
            assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tone_lands_in_one_bin() {
        let x: Vec<Complex64> = (0..16)
            .map(|n| Complex64::from_polar(1.0, 2.0 * PI * 3.0 * n as f64 / 16.0))
            .collect();
        let y = dft(&x, false).unwrap();
        let oracle = direct_dft(&x, false);
        for (k, v) in y.iter().enumerate() {
            assert!((v - oracle[k]).norm() < 1e-12);
            if k == 3 {
                assert!((v - Complex64::new(4.0, 0.0)).norm() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12, "bin {k} = {v}");
            }
        }
    }

    #[test]
    fn matches_direct_sum() {
        for &n in &[4usize, 16, 64] {
            let x = sample_cgaussian(SeededStream::new(3, n as u64), n, 1.0).unwrap();
            for inverse in [false, true] {
                let fast = dft(&x, inverse).unwrap();
                let slow = direct_dft(&x, inverse);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unitary_round_trip_and_parseval() {
        for &n in &[4usize, 16, 1024] {
            let x = sample_cgaussian(SeededStream::new(11, n as u64), n, 1.0).unwrap();
            let y = dft(&x, false).unwrap();
            let back = dft(&y, true).unwrap();
            let err = x.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n} round trip err {err}");
            let ex = energy(&x);
            assert!((ex - energy(&y)).abs() / ex < 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        let x = vec![Complex64::new(1.0, 0.0); 12];
        assert!(matches!(dft(&x, false), Err(Error::Sizing(12))));
        assert!(matches!(dft(&[], false), Err(Error::Sizing(0))));
    }
}
