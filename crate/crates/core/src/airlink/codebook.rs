use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::unit_root;

/// The `M − 1` non-constant Fourier codes of length `M`.
///
/// `c_k(m) = e^{j2πkm/M}` for `k = 1..M−1` and block `m = 0..M−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeBook {
    len: usize,
    codes: Vec<Vec<Complex64>>,
}

impl CodeBook {
    pub fn fourier(m_blocks: usize) -> Result<Self> {
        if m_blocks < 2 {
            return Err(Error::Parameter(format!("code length must be at least 2, got {m_blocks}")));
        }
        let codes = (1..m_blocks)
            .map(|k| {
                (0..m_blocks)
                    .map(|m| unit_root((k * m) as i64, m_blocks as u64))
                    .collect()
            })
            .collect();
        Ok(Self { len: m_blocks, codes })
    }

    /// Length `M` of each code.
    pub fn code_len(&self) -> usize {
        self.len
    }

    /// Number of codes, `M − 1`.
    pub fn size(&self) -> usize {
        self.codes.len()
    }

    /// Code `k`, `1 ≤ k ≤ M − 1`.
    pub fn code(&self, k: usize) -> Result<&[Complex64]> {
        if k == 0 || k > self.codes.len() {
            return Err(Error::Index(format!("code {k} outside 1..={}", self.codes.len())));
        }
        Ok(&self.codes[k - 1])
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> {
        1..=self.codes.len()
    }
}

pub fn fourier_codebook(m_blocks: usize) -> Result<CodeBook> {
    CodeBook::fourier(m_blocks)
}
