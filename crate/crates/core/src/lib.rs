//! Fractional Hermite heat semigroup, discrete Gabor analysis, τ-quantization
//! and Picard solvers for semilinear heat equations in modulation spaces.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fft;
pub mod grid;
pub mod quant;
pub mod spectral;
pub mod tf;

pub use error::{Error, Result};
pub use grid::{GridFunction, GridSpec};
