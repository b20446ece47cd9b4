//! CFO estimation and active-code detection.
//!
//! Each bin vector `Y(i)` (one bin across the `M` blocks) lies, up to
//! noise, in the span of the rotated codes `Γ(ω_k)c_k` of the active
//! stations. The number of active codes comes from MDL on the eigenvalues
//! of the forward–backward averaged correlation; each code's CFO is the
//! peak of its MUSIC pseudospectrum, and the codes with the largest peaks
//! are declared active.

mod correlation;
mod detector;
mod mdl;
mod music;

pub use correlation::{sample_correlation, CorrelationEstimate};
pub use detector::{detect_codes, CodeCandidate, DetectionResult};
pub use mdl::{mdl_metric, mdl_order, EIGENVALUE_FLOOR};
pub use music::{estimate_cfo, music_spectrum, CfoEstimate, CfoSearch, NoiseSubspace, DENOMINATOR_FLOOR};
