//! Entangled twin-beam statistics for a doubly-resonant optical parametric
//! amplifier, at desk scale.
//!
//! The crate computes, samples, and cross-validates the conditional
//! correlations of continuous-variable entangled beams:
//!
//! * [`epr`] — finite-dimensional entangled pairs: conjugate-basis
//!   re-expansion, bilateral scattering, and perfectly correlated projective
//!   measurements.
//! * [`opa`] — closed-form fluorescence and phase-sensitive spectra of the
//!   amplifier and the Bose-Einstein mode-pair state they imply.
//! * [`quadrature`] — homodyne statistics of the two-mode squeezed vacuum:
//!   exact marginal/conditional moments, Gaussian sampling, and the
//!   large-N̄ limit where the beams become quadrature duplicates.
//! * [`pair`] — single photon-pair states over a Fourier-mode grid and
//!   conjugate-state projection fidelities.
//! * [`counting`] — photocount-difference variances for cavity-loading and
//!   Butterworth filter-penetration measurements.
//! * [`fock`] — brute-force truncated Fock-space validator certifying the
//!   closed forms above without Gaussian moment factoring.
//!
//! All core math is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the working precision used
//! by the CLI and the test suite.

// Validation guards are written as `if !(x > 0)` so that NaN inputs are
// rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting;
pub mod epr;
pub mod error;
pub mod fock;
pub mod integrate;
pub mod linalg;
pub mod opa;
pub mod pair;
pub mod quadrature;
pub mod rng;
pub mod scalar;

pub use error::{Error, ErrorFamily, Result};
pub use scalar::Real;

pub type OpaParams64 = opa::OpaParams<f64>;
pub type TwoModeSqueezed64 = opa::TwoModeSqueezedState<f64>;
pub type EntangledPair64 = epr::EntangledPair<f64>;
pub type ScatteringMatrix64 = epr::ScatteringMatrix<f64>;
pub type ProjectiveMeasurement64 = epr::ProjectiveMeasurement<f64>;
pub type PairState64 = pair::PairState<f64>;
pub type WavepacketState64 = pair::WavepacketState<f64>;
pub type CavityConfig64 = counting::CavityConfig<f64>;
pub type FilterConfig64 = counting::FilterConfig<f64>;
pub type CountStatistics64 = counting::CountStatistics<f64>;
pub type CountingKernel64 = fock::CountingKernel<f64>;
