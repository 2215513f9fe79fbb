//! Semilinear heat flow `u' = −H^β u + F(u)`: nonlinearities, the Duhamel
//! operator, Picard iteration and numerical probes of the boundedness and
//! Lipschitz statements.

mod duhamel;
mod etd;
mod nonlinearity;
mod picard;
mod probes;
mod search;
mod time;

pub use duhamel::{duhamel, duhamel_all};
pub use etd::etdrk4;
pub use nonlinearity::{eval_nonlinearity, Nonlinearity, SeriesTerm};
pub use picard::{fixed_point_residual, nonlinear_trajectory, picard_solve, picard_step, ContractionReport};
pub use probes::{
    gaussian_class, lipschitz_probe, semigroup_bound_probe, BoundProbe, BoundReport, LipschitzReport,
};
pub use search::{local_time_search, SearchOptions, TimeProbe, TimeSearch};
pub use time::{TimeGrid, Trajectory};
