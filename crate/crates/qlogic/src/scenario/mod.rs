//! Config-driven scenario runner.
//!
//! A scenario is a TOML config naming one of six experiments plus its
//! input state and bases. [`parse_config`] validates the file into a
//! [`Config`], [`run_scenario`] executes it, and the resulting [`Report`]
//! renders as aligned text or as CSV with the columns
//! `check_name,exact,empirical,tolerance,pass`.
//!
//! Config keys:
//!
//! * `scenario`: one of `theorem1`, `theorem2`, `retrodiction`, `eprb`,
//!   `dual-ensemble`, `chain`.
//! * `state.vector` (single-system) or `state.matrix` (bipartite), complex
//!   entries written as `[re, im]` pairs.
//! * `basis` / `basis1` / `basis2`: either `angle = x` (two-dimensional
//!   analyzer rotated by `x` radians) or explicit `eigenvalues` and
//!   `vectors`. Missing bases default to the computational one.
//! * `trials` (default 100000), `seed` (default 42), `steps` (chain
//!   length, default 1), `eps` (support threshold), `order` (`"1-then-2"`
//!   or `"2-then-1"`), `dims` (optional cross-check), `out`, `records`.
//!
//! Error classes map to distinct process exit codes via
//! [`ScenarioError::exit_code`]: 2 for normalization violations, 3 for an
//! unknown scenario name, 4 for syntax or other invalid config values, 5
//! for dimension mismatches, 6 for file I/O, and 1 for a numerical
//! consistency failure during the run itself. Exit code 0 means every
//! check passed.

mod config;
mod report;
mod run;

pub use config::{parse_config, Config, Scenario, ScenarioInput};
pub use config::{DEFAULT_SEED, DEFAULT_STEPS, DEFAULT_TRIALS};
pub use report::{CheckRecord, CheckStatus, Format, Report};
pub use run::{run_scenario, RunOutput};

use crate::error::Error;

/// Everything that can go wrong between reading a config and finishing a
/// report.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    /// A core validation or consistency error, classified by variant.
    #[error(transparent)]
    Config(#[from] Error),
    #[error("io: {0}")]
    Io(String),
}

impl ScenarioError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Syntax(_) => 4,
            ScenarioError::UnknownScenario(_) => 3,
            ScenarioError::Config(e) => match e {
                Error::NotNormalized { .. } | Error::ZeroVector => 2,
                Error::DimensionMismatch { .. }
                | Error::BadShape { .. }
                | Error::IndexOutOfRange { .. }
                | Error::BasisMismatch => 5,
                Error::ConsistencyCheck { .. } => 1,
                _ => 4,
            },
            ScenarioError::Io(_) => 6,
        }
    }
}
