//! Drift certificates, compatibility radii, and the explicit geometric
//! ergodicity bound `M(x)(1 - rho)^t`.

mod contraction;
mod drift;
mod dtable;
mod pipeline;

pub use contraction::{bound_rhs, solve_contraction, BoundSource, Contraction, GeometricBound};
pub use drift::{
    compatibility_check, default_lambda_grid, drift_envelope, escape_bound, fit_drift, lazy_drift_params,
    verify_drift, CompatibilityMode, CompatibilityReport, DriftCertificate, DriftCheck,
};
pub use dtable::{check_dtable, hit_to_mix, DTable, DTableCheck, DTableEntry};
pub use pipeline::{certify_drift_and_hit, CertifyOptions, CertificationReport, EpsilonSource, StepSource};
