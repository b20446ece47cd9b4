//! Initial ranging for OFDMA uplinks.
//!
//! Ranging subscriber stations spread a code over `M` consecutive OFDM
//! blocks on a set of ranging subcarriers. The receiver here
//!
//! * estimates how many codes are active (MDL on the FB-averaged
//!   correlation eigenvalues),
//! * finds which codes are active and their carrier frequency offsets
//!   (MUSIC pseudospectrum search per code),
//! * decouples the users and recovers timing offsets and channel taps with
//!   a least-squares search or its reduced-complexity split `θ = β + pQ`.
//!
//! [`airlink`] holds the ground-truth signal model used to drive the
//! estimators, and [`harness`] runs Monte Carlo sweeps over it.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod airlink;
pub mod error;
pub mod harness;
pub mod numkit;
pub mod subspace;
pub mod timing;

pub use error::{Error, Result};
pub use num_complex::Complex64;
