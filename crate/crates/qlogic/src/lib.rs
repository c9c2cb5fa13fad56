//! Truth values of physical statements as projection operators, and what ideal
//! projective measurement does to them.
//!
//! The library works on small dense complex state spaces (dimension 16 or less
//! per factor). A statement "the observable K has value k" is represented by
//! the projector onto the matching eigenspace; its truth value on a state is
//! the projector expectation, classified as true, false, or indeterminate.
//! On top of that sit an ideal-measurement Monte Carlo engine with per-trial
//! random substreams, bipartite (two-channel) states with conditional partner
//! states and joint distributions, and a scenario runner that turns config
//! files into pass/fail reports.
//!
//! Modules:
//! - [`hilbert`]: complex vectors, matrices, orthonormal eigenbases.
//! - [`logic`]: statements, projectors, three-valued truth assignment.
//! - [`measurement`]: Born sampling, repeated-stage trials, ensembles.
//! - [`eprb`]: bipartite states, conditional states, correlation checks.
//! - [`scenario`]: config parsing, scenario execution, report emission.

pub mod eprb;
pub mod error;
pub mod hilbert;
pub mod logic;
pub mod measurement;
pub mod scenario;
pub mod stats;
pub mod tol;

pub use error::{Error, Result};
pub use hilbert::{ComplexMatrix, ObservableBasis, StateVector};
pub use logic::{Statement, Truth, TruthValue};
pub use measurement::{Ensemble, Outcome, Substreams, TrialRecord};
