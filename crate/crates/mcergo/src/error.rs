use std::path::PathBuf;

use mcergo_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Analysis(#[from] CoreError),
    #[error("svg: no series to plot")]
    EmptySeries,
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for analysis failures, 2 for configuration and IO problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Analysis(_) | HarnessError::EmptySeries => 1,
            HarnessError::Config(_) | HarnessError::Io { .. } | HarnessError::Format { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Short kebab-case name of a core error, used in status columns.
pub fn error_kind(e: &CoreError) -> &'static str {
    use CoreError::*;
    match e {
        NegativeEntry { .. } => "negative-entry",
        NonFiniteEntry { .. } => "non-finite-entry",
        RowSumViolation { .. } => "row-sum-violation",
        DimensionMismatch { .. } => "dimension-mismatch",
        InvalidCoordinates => "invalid-coordinates",
        TooManyStates { .. } => "too-many-states",
        DensityNonpositive { .. } => "density-nonpositive",
        InvalidDensity(_) => "invalid-density",
        InvalidGridStep { .. } => "invalid-grid-step",
        ProposalNotReversible => "proposal-not-reversible",
        NotReversible => "not-reversible",
        GridMismatch => "grid-mismatch",
        ZeroProbabilityCell { .. } => "zero-probability-cell",
        EmptySubset => "empty-subset",
        SingularCensoring => "singular-censoring",
        Reducible { .. } => "reducible",
        LengthMismatch { .. } => "length-mismatch",
        NotNormalized { .. } => "not-normalized",
        NotMixedByHorizon { .. } => "not-mixed-by-horizon",
        EmptyTarget => "empty-target",
        Unreachable { .. } => "unreachable",
        NoFeasibleSet { .. } => "no-feasible-set",
        MissingCoordinates => "missing-coordinates",
        DegenerateOverlap { .. } => "degenerate-overlap",
        AllCensored { .. } => "all-censored",
        NotDominating { .. } => "not-dominating",
        InvalidParameters(_) => "invalid-parameters",
        NonpositiveDenominator { .. } => "nonpositive-denominator",
        IncompatibleRadius { .. } => "incompatible-radius",
        IncompatibleCertificate(_) => "incompatible-certificate",
        DriftViolated { .. } => "drift-violated",
        MissingAlpha { .. } => "missing-alpha",
        InvalidTable(_) => "invalid-table",
        Singular => "singular",
        SolverDisagreement { .. } => "solver-disagreement",
    }
}
