//! Discrete short-time Fourier transform on lattice sections, its Riemann-sum
//! inversion, polynomial weights and weighted mixed-norm estimators.

mod norm;
mod phase_grid;
mod stft;
mod window;

pub use norm::{
    japanese_bracket, mixed_norm, mixed_sequence_norm, mod_norm, mod_norm_on, parse_exponent,
    weight_eval, NormReport, Weight, WeightKind,
};
pub use phase_grid::{PhaseGrid, DEFAULT_STEP, FRAME_DENSITY_LIMIT};
pub use stft::{istft, stft, stft_point, Reconstruction, STFTTable};
pub use window::{tf_shift, tf_shift_interpolated, Window};
