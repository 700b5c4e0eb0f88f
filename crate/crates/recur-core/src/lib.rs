//! Return-time statistics for powers of Haar-random unitary matrices.
//!
//! The central quantity is the probability that all eigenvalues of `U^t`,
//! for `U` an `N x N` Haar-unitary matrix, lie in the arc
//! `[exp(-i pi eps), exp(i pi eps)]` around 1. The crate computes it four
//! ways, at desk scale:
//!
//! - [`toeplitz`] -- exactly, as a symmetric Toeplitz determinant whose
//!   symbol is the indicator of the return window (extended-precision
//!   arithmetic keeps the exponentially small determinants honest);
//! - [`asymptotics`] -- in closed form for large `N` (one-cut Widom-type
//!   expansion, integer-time expansions, and threshold estimates for weak
//!   and real-part returns);
//! - [`abia`] -- approximately for non-integer times, by reducing the
//!   multi-interval log-gas to a quadratic program over filling fractions
//!   (average block interaction approximation);
//! - [`montecarlo`] -- empirically, with CUE and i.i.d. eigenangle samplers,
//!   first-return-time experiments and exponential-law fits.
//!
//! [`windows`] holds the time-dependent arc-interval geometry shared by all
//! of the above, and [`validate`] bundles the cross-checks between routes.

pub mod abia;
pub mod asymptotics;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod toeplitz;
pub mod validate;
pub mod windows;

mod mp_det;

pub use error::Error;
pub use toeplitz::{LogProb, Method};
pub use windows::{build_window, Regime, ReturnWindow};
