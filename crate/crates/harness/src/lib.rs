//! Batch experiments for inextensible chain dynamics: configuration, execution and data files.

pub mod config;
pub mod emit;
pub mod experiments;
pub mod manifest;

pub use config::{parse_config, parse_str, ConfigError, ExperimentConfig, Format, Kind};
pub use experiments::{run_experiment, HarnessError, Outcome, RunOptions};
pub use manifest::RunManifest;

/// Process exit codes of the `whipchain` binary.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const VIOLATIONS: i32 = 4;
}

/// Exit code for a finished experiment: nonzero when a property suite found violations.
pub fn success_code(outcome: &Outcome) -> i32 {
    if outcome.manifest.violations > 0 {
        exit::VIOLATIONS
    } else {
        exit::SUCCESS
    }
}

/// Exit code for a failed experiment.
pub fn exit_code(err: &HarnessError) -> i32 {
    match err {
        HarnessError::Numeric(_) => exit::NUMERIC,
        HarnessError::Emit(_) | HarnessError::Io { .. } | HarnessError::Pool(_) => exit::IO,
    }
}
