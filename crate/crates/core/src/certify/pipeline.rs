use alloc::vec::Vec;

use super::contraction::{solve_contraction, BoundSource, Contraction, GeometricBound};
use super::drift::{
    compatibility_check, escape_bound, verify_drift, CompatibilityMode, CompatibilityReport, DriftCertificate,
    DriftCheck,
};
use super::dtable::DTable;
use crate::analysis::{default_horizon, max_hitting_time, mixing_time, pseudo_minorization, HitStrategy, EPS_MIX};
use crate::kernels::{restrict, FiniteKernel, Restriction, RestrictionVariant, StateSet};
use crate::{tol, Error, Result};

/// Tuning for [`certify_drift_and_hit`].
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions<'d> {
    pub alpha: f64,
    /// When present, the block length comes from `d_alpha t_H^(C)(alpha)`
    /// instead of the exact restricted mixing time.
    pub dtable: Option<&'d DTable>,
    /// Largest chain for which the overlap constant is computed exactly.
    pub exact_epsilon_max_states: usize,
    /// Horizon for the exact mixing-time search; `None` uses the default.
    pub mixing_horizon: Option<usize>,
}

impl Default for CertifyOptions<'_> {
    fn default() -> Self {
        Self {
            alpha: 1.0 / 3.0,
            dtable: None,
            exact_epsilon_max_states: 512,
            mixing_horizon: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSource {
    /// `t_m^(C)(C')` computed exactly.
    ExactMixing,
    /// `ceil(d_alpha t_H^(C)(alpha))` with the table constant used.
    HitTable { t_h: f64, d_alpha: f64, verified: bool },
}

impl StepSource {
    pub fn name(&self) -> &'static str {
        match self {
            StepSource::ExactMixing => "exact-mixing",
            StepSource::HitTable { .. } => "hit-table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonSource {
    /// `1 - max TV` over pairs in `C'`, computed from the `T+1`-step kernel.
    Exact,
    /// The `1/3` overlap guaranteed once `T` is a mixing time of `g^(C)`.
    Theory,
}

impl EpsilonSource {
    pub fn name(self) -> &'static str {
        match self {
            EpsilonSource::Exact => "exact",
            EpsilonSource::Theory => "theory",
        }
    }
}

/// Every intermediate quantity of one certification run.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub compatibility: CompatibilityReport,
    pub drift: DriftCheck,
    pub restricted_drift: DriftCheck,
    pub variant: RestrictionVariant,
    pub c: StateSet,
    pub c_prime: StateSet,
    /// Mixing-time estimate `T` for `g^(C)` from `C'`.
    pub t_mix: usize,
    pub step_source: StepSource,
    pub epsilon_exact: Option<f64>,
    pub epsilon_theory: f64,
    pub epsilon_source: EpsilonSource,
    /// Drift parameters of the `T+1`-step kernel.
    pub lambda_steps: f64,
    pub b_steps: f64,
    pub escape_bound: f64,
    pub contraction: Contraction,
    pub bound: GeometricBound,
}

/// Assembles `TV(g(x, t, .), pi) <= M(x)(1 - rho)^{floor(t / (T+1))}`.
///
/// Steps: check the two-radius compatibility; verify drift for `g` and for
/// `g^(C)` on `C = {V <= r}`; take `T` from the exact mixing time of
/// `g^(C)` started in `C' = {V <= r'}` (or from the hit table); take the
/// overlap `eps` of the `T+1`-step kernel on `C'` (exact when affordable,
/// else `1/3`); and solve the contraction for the `T+1`-step kernel, whose
/// drift parameters are `(lambda^{T+1}, b (1 - lambda^{T+1})/(1 - lambda))`,
/// with radius `r'`.
pub fn certify_drift_and_hit(
    k: &FiniteKernel,
    cert: &DriftCertificate,
    how: Restriction<'_>,
    options: &CertifyOptions<'_>,
) -> Result<CertificationReport> {
    if cert.v.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: cert.v.len(),
        });
    }
    let compatibility = compatibility_check(cert, CompatibilityMode::TwoRadius);
    if let Some(violated) = compatibility.violation() {
        return Err(Error::IncompatibleCertificate(violated));
    }
    let drift = verify_drift(k, &cert.v, cert.lambda, cert.b)?;
    if !drift.passes {
        return Err(Error::DriftViolated {
            state: drift.worst_state,
            slack: drift.slack,
        });
    }
    let (c, c_prime) = (cert.c(), cert.c_prime());
    if c_prime.is_empty() {
        return Err(Error::EmptySubset);
    }
    let restricted = restrict(k, &c, how)?;
    let v_local: Vec<f64> = restricted.states().iter().map(|&i| cert.v[i]).collect();
    let restricted_drift = verify_drift(restricted.kernel(), &v_local, cert.lambda, cert.b)?;
    if !restricted_drift.passes {
        return Err(Error::DriftViolated {
            state: restricted.states()[restricted_drift.worst_state],
            slack: restricted_drift.slack,
        });
    }

    let gc = restricted.kernel();
    let (t_mix, step_source) = match options.dtable {
        None => {
            let starts = StateSet::from_predicate(gc.n(), |a| c_prime.contains(restricted.states()[a]));
            let horizon = options.mixing_horizon.unwrap_or_else(|| default_horizon(gc.n()));
            (mixing_time(gc, EPS_MIX, &starts, false, horizon)?, StepSource::ExactMixing)
        }
        Some(table) => {
            let entry = table.get(options.alpha)?;
            let strategy = if gc.n() <= tol::MAX_BRUTE_STATES {
                HitStrategy::Brute
            } else {
                HitStrategy::Interval
            };
            let t_h = max_hitting_time(gc, options.alpha, strategy)?.t_h;
            let t = libm::ceil(entry.upper * t_h) as usize;
            (
                t,
                StepSource::HitTable {
                    t_h,
                    d_alpha: entry.upper,
                    verified: entry.verified,
                },
            )
        }
    };
    let steps = t_mix + 1;

    let epsilon_theory = 1.0 / 3.0;
    let epsilon_exact = if k.n() <= options.exact_epsilon_max_states {
        Some(pseudo_minorization(k, &c_prime, steps)?.epsilon)
    } else {
        None
    };
    let (epsilon, epsilon_source) = match epsilon_exact {
        Some(e) => (e.min(1.0 - tol::BALANCE), EpsilonSource::Exact),
        None => (epsilon_theory, EpsilonSource::Theory),
    };

    let lambda_steps = libm::pow(cert.lambda, steps as f64);
    let b_steps = cert.b * (1.0 - lambda_steps) / (1.0 - cert.lambda);
    let contraction = solve_contraction(epsilon, lambda_steps, b_steps, cert.r_prime)?;
    let escape = escape_bound(cert.lambda, cert.b, cert.r, cert.r_prime)?;
    let source = if c.is_full() {
        BoundSource::PseudoMinorization
    } else {
        BoundSource::DriftAndHit
    };
    let bound = GeometricBound {
        epsilon,
        steps,
        p: contraction.p,
        rho: contraction.rho,
        m_offset: 2.0 + cert.b / (1.0 - cert.lambda),
        source,
    };
    Ok(CertificationReport {
        compatibility,
        drift,
        restricted_drift,
        variant: how.variant(),
        c,
        c_prime,
        t_mix,
        step_source,
        epsilon_exact,
        epsilon_theory,
        epsilon_source,
        lambda_steps,
        b_steps,
        escape_bound: escape,
        contraction,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{stationary_distribution, tv_distance};
    use alloc::vec;

    fn two_state() -> FiniteKernel {
        FiniteKernel::new(&[vec![0.5, 0.5], vec![0.25, 0.75]], None).unwrap()
    }

    #[test]
    fn incompatible_radii_rejected() {
        let cert = DriftCertificate::new(vec![0.0, 1.0], 0.5, 1.0, 240.0, 5.0).unwrap();
        let err = certify_drift_and_hit(&two_state(), &cert, Restriction::Mh, &CertifyOptions::default()).unwrap_err();
        assert_eq!(err, Error::IncompatibleCertificate("r > (2b+24r')/(1-lambda)"));
    }

    #[test]
    fn full_space_reduces_to_pseudo_minorization() {
        let k = two_state();
        // V = 0 with b = 0: every radius is compatible and C is everything.
        let cert = DriftCertificate::new(vec![0.0, 0.0], 0.0, 0.0, 1.0, 0.01).unwrap();
        let rep = certify_drift_and_hit(&k, &cert, Restriction::Mh, &CertifyOptions::default()).unwrap();
        assert_eq!(rep.bound.source, BoundSource::PseudoMinorization);
        let pi = stationary_distribution(&k).unwrap();
        let starts = StateSet::full(2);
        assert_eq!(rep.t_mix, mixing_time(&k, EPS_MIX, &starts, false, 100).unwrap());
        for x in 0..2 {
            for t in 0..60u64 {
                let tv = tv_distance(&k.t_step_row(x, t as usize), &pi).unwrap();
                assert!(tv <= rep.bound.eval(0.0, t));
            }
        }
    }
}
