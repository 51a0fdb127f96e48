//! Multifractal analysis with p-exponents, lacunarity exponents and
//! leader-based multifractal formalisms.
//!
//! The pipeline runs from a sampled signal (or a coefficient field built
//! directly) through a periodic Daubechies transform to sup-, p- and
//! L-leaders, then to log-scale regressions and Legendre spectra.

/// Library version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod dyadic;
pub mod error;
pub mod exponents;
pub mod generators;
pub mod leaders;
pub mod mfa;
pub mod sentinel;
pub mod wavelet;

pub use dyadic::{children_in_3lambda, locate, ChildRange, DyadicIndex};
pub use error::{Error, Result};
pub use exponents::{RegressionFit, ScaleRange, ScalingFunction};
pub use leaders::{LeaderField, LeaderKind};
pub use mfa::{Spectrum, StructureFunctions, ZeroPolicy};
pub use wavelet::{CoefficientField, FilterBank, Normalization};
