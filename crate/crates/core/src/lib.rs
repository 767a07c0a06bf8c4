//! Phase-space analysis on finite grids.
//!
//! The crate discretizes functions on ℝ or ℝ² ([`grid`]), computes short-time
//! Fourier and Bargmann transforms ([`stft`]), localization functionals
//! ([`localization`]), point-set densities ([`geometry`]), restriction and
//! localization operators ([`spectral`]), Gramian-based analysis of finite
//! function systems ([`frames`]) and Fock-space kernel diagnostics ([`fock`]).

pub mod corpus;
pub mod error;
pub mod fock;
pub mod frames;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod localization;
pub mod spectral;
pub mod stft;

pub use error::{Error, Result};
pub use grid::{GridSpec, PhasePoint, SampledFunction, C64};

/// Crate version, recorded in experiment provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
