//! Numeric tolerances shared across the crate.
//!
//! All quantities compared against these are unit-scale (amplitudes,
//! probabilities, entries of projectors), so absolute tolerances are
//! appropriate throughout.

/// Absolute tolerance on unit-scale construction checks: normalization,
/// orthogonality, projector idempotence, eigenvalue matching.
pub const ATOL: f64 = 1e-10;

/// Tighter tolerance for algebraic identities that involve no cancellation
/// risk, e.g. two arithmetic routes to the same probability.
pub const EXPECT_ATOL: f64 = 1e-12;

/// Band half-width for three-valued truth classification. An expectation
/// above `1 - TRUTH_BAND` counts as true, below `TRUTH_BAND` as false,
/// anything between as indeterminate.
pub const TRUTH_BAND: f64 = 1e-9;

/// Default amplitude-magnitude threshold deciding which eigenvectors belong
/// to the support of a state.
pub const SUPPORT_EPS: f64 = 1e-9;

/// Outcomes with probability below this floor are treated as impossible and
/// excluded from samplers.
pub const PROB_FLOOR: f64 = 1e-14;

/// Looser norm tolerance accepted when building bipartite states from user
/// supplied amplitude matrices.
pub const BIPARTITE_NORM_ATOL: f64 = 1e-8;
