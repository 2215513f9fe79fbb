//! Run configuration, dataset emission and the verification harness behind
//! the `modheat` binary.

mod config;
mod output;
mod presets;
mod run;
mod verify;

pub use config::{
    Command, DecayFitParams, EllipticityParams, GaborParams, InitialData, ModnormParams, PropagateParams,
    RunConfig, SeminormKind, SeminormParams, SolveParams, StftParams, TimeSearchParams, VerifyParams,
    WignerParams,
};
pub use output::{config_hash, metadata, write_atomic, FLOAT_DISCLAIMER};
pub use presets::{initial_field, initial_grid, preset_grid, INITIAL_PRESETS};
pub use run::{exit_code, init_threads_from_env, read_sweep_csv, run, RunOutcome};
pub use verify::{list_suites, run_suite, Check, SuiteInfo, VerifyReport};
