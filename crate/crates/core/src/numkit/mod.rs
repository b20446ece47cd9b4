//! Numerical kernels shared by the rest of the crate: a unitary radix-2
//! FFT, a cyclic Jacobi eigensolver for small Hermitian matrices, and
//! keyed complex-Gaussian streams.

mod dft;
mod eig;
mod matrix;
mod rng;
mod roots;

pub use dft::{dft, dft_in_place};
pub use eig::{hermitian_eig, EigenDecomposition, MAX_SWEEPS};
pub use matrix::{CMatrix, ComplexVector};
pub use rng::{sample_cgaussian, SeededStream};
pub use roots::unit_root;

pub(crate) use rng::draw_cgaussian;
