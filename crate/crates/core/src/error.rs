use alloc::vec::Vec;

/// Errors raised by kernel construction, analysis, simulation, and
/// certification.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("negative transition probability {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("row {row} sums to {sum}, deviation exceeds tolerance")]
    RowSumViolation { row: usize, sum: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state coordinates must be strictly increasing points in [0, 1]")]
    InvalidCoordinates,
    #[error("chain has {states} states, above the cap of {cap}")]
    TooManyStates { states: usize, cap: usize },
    #[error("density is not positive at x = {x}")]
    DensityNonpositive { x: f64 },
    #[error("invalid density specification: {0}")]
    InvalidDensity(&'static str),
    #[error("grid step must have an integer reciprocal of at least {min}, got 1/{inv}")]
    InvalidGridStep { inv: u32, min: u32 },
    #[error("proposal kernel is not reversible")]
    ProposalNotReversible,
    #[error("kernel is not reversible with respect to its stationary law")]
    NotReversible,
    #[error("target and proposal do not share a grid")]
    GridMismatch,
    #[error("probability table has a zero cell at ({row}, {col})")]
    ZeroProbabilityCell { row: usize, col: usize },
    #[error("state subset is empty")]
    EmptySubset,
    #[error("censored chain is singular: the complement of the subset traps mass")]
    SingularCensoring,
    #[error("kernel is reducible: {classes} closed classes")]
    Reducible { classes: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("vector is not a probability vector (sum {sum})")]
    NotNormalized { sum: f64 },
    #[error("not mixed within the horizon of {horizon} steps")]
    NotMixedByHorizon { horizon: usize, profile: Vec<f64> },
    #[error("hitting target is empty")]
    EmptyTarget,
    #[error("target set is unreachable from state {state}")]
    Unreachable { state: usize },
    #[error("no set has stationary mass at least {alpha}")]
    NoFeasibleSet { alpha: f64 },
    #[error("kernel has no state coordinates")]
    MissingCoordinates,
    #[error("pseudo-minorization overlap is degenerate (max TV = {max_tv})")]
    DegenerateOverlap { max_tv: f64 },
    #[error("every replica was censored at the horizon of {horizon} steps")]
    AllCensored { horizon: u64 },
    #[error("restricted kernel does not dominate the base kernel at ({from}, {to})")]
    NotDominating { from: usize, to: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("denominator r(1 - lambda) - b = {value} is not positive")]
    NonpositiveDenominator { value: f64 },
    #[error("radius is incompatible: (1 + 2b + lambda r) / (1 + r) = {a} is not below one")]
    IncompatibleRadius { a: f64 },
    #[error("certificate is incompatible: {0}")]
    IncompatibleCertificate(&'static str),
    #[error("drift condition fails at state {state} (slack {slack})")]
    DriftViolated { state: usize, slack: f64 },
    #[error("no table entry for alpha = {alpha}")]
    MissingAlpha { alpha: f64 },
    #[error("invalid table: {0}")]
    InvalidTable(&'static str),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("closed form and bisection disagree by {gap}")]
    SolverDisagreement { gap: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
