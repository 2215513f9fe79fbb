//! τ-Wigner distributions, τ-pseudodifferential operators, Gabor matrices by
//! two independent routes, symbol semi-norms and decay-bound fitting.

mod decay;
mod gabor;
mod operator;
mod phase;
mod seminorm;
mod symbol;
mod wigner;

pub use decay::{bound_value, corollary_bound, decay_fit, decay_fit_window, DecayFit, SLOPE_WINDOW};
pub use gabor::{
    gabor_matrix_direct, gabor_matrix_identity, gabor_sweep, phase_space_stft, DirectEntry,
    DirectRoute, GaborMatrixSample, IdentityRoute, RaySampling, Sweep, DIVISION_GUARD,
};
pub use operator::{fourier_multiplier, opt_apply, symbol_pairing, TauOperator, MAX_TAU_DENOMINATOR};
pub use phase::PhaseSpaceFunction;
pub use seminorm::{
    ellipticity_check, shubin_seminorm, symbol_seminorm, EllipticityReport, SamplingBox,
    SeminormEstimate, MAX_DERIVATIVE_ORDER,
};
pub use symbol::{Symbol, SymbolBackend};
pub use wigner::{j_map, t_tau, tau_wigner, Tau};
