//! Wirtinger sufficiency criterion for Gabor frames over lattices.
//!
//! The crate evaluates the density bound
//!
//! ```text
//! δ_g(ω) = ½ · sqrt( Σ_k |ĝ(k+ω)|² / Σ_k (k+ω)² |ĝ(k+ω)|² ),   ω ∈ [0, 1]
//! ```
//!
//! with rigorously truncated lattice sums, and certifies that `𝒢(g, δℤ×ℤ)` is a
//! frame whenever `δ < min_ω δ_g(ω)`. Around that core sit:
//!
//! * [`window`]: Gaussian, Hermite, sampled, dilated, chirped windows with
//!   closed-form spectra and Gaussian-type decay envelopes.
//! * [`criterion`]: lattice sums, `δ_g`, density profiles and verdicts.
//! * [`barrier`]: the odd-window barrier `δ_g(0) < 1/2`.
//! * [`certify_gaussian`]: the hand certificate for the Gaussian window.
//! * [`lattice`]: planar lattices, Iwasawa factors, reduction to `δℤ×ℤ`.
//! * [`metaplectic`]: fractional Fourier transform, chirps and dilations on
//!   sampled functions.
//! * [`oracle`]: finite-dimensional Gabor frame operators as independent evidence.

pub mod barrier;
pub mod certify_gaussian;
pub mod criterion;
pub mod error;
pub mod lattice;
pub mod metaplectic;
pub mod oracle;
pub mod sampled;
pub mod summation;
pub mod window;

pub use error::{GaborError, Result};
pub use num_complex::Complex64;

/// Shortest decimal that parses back to exactly `x`; `NaN`, `inf`, `-inf` otherwise.
pub fn format_float(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}
