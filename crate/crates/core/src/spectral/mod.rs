//! Hermite eigenbasis, grid/spectral transforms and the fractional heat
//! semigroup `e^{-tH^β}`, which acts diagonally on Hermite coefficients.

mod field;
mod hermite;

pub use field::{
    analyze, apply_semigroup, eigenvalue, propagate, rates, synthesize, SpectralField,
};

pub use hermite::{
    default_half_width, enumerate_multi_indices, hermite_column, hermite_eval, HermiteBasis,
    MultiIndex, DEFAULT_MARGIN, MIN_MARGIN,
};
