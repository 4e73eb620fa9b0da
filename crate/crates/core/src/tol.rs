//! Numerical tolerances shared across the crate.

/// Row sums of a stored kernel must be within this of one.
pub const ROW_SUM: f64 = 1e-12;

/// Input rows deviating from one by more than this are rejected instead of
/// renormalized.
pub const ROW_SUM_INPUT: f64 = 1e-9;

/// Residual target for dense linear solves.
pub const LINEAR_SOLVE: f64 = 1e-12;

/// Equality assertions between two routes to the same quantity.
pub const EQUALITY: f64 = 1e-10;

/// Absolute tolerance for quadrature and quantile bisection.
pub const QUADRATURE: f64 = 1e-8;

/// Probability vectors handed to distance routines must sum to one within this.
pub const NORMALIZED: f64 = 1e-9;

/// Slack allowed on detailed-balance and domination checks.
pub const BALANCE: f64 = 1e-12;

/// Largest chain accepted by the dense routines.
pub const MAX_STATES: usize = 4096;

/// Largest chain accepted by brute-force subset enumeration.
pub const MAX_BRUTE_STATES: usize = 14;
