use alloc::vec::Vec;

use crate::kernels::{FiniteKernel, StateSet};
use crate::{tol, Error, Result};

/// A Lyapunov function `V` with drift parameters `(lambda, b)` and the two
/// sublevel radii `r' < r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftCertificate {
    pub v: Vec<f64>,
    pub lambda: f64,
    pub b: f64,
    pub r: f64,
    pub r_prime: f64,
}

impl DriftCertificate {
    pub fn new(v: Vec<f64>, lambda: f64, b: f64, r: f64, r_prime: f64) -> Result<Self> {
        check_params(lambda, b)?;
        check_v(&v)?;
        if !r.is_finite() || !r_prime.is_finite() {
            return Err(Error::InvalidParameters("radii must be finite"));
        }
        Ok(Self {
            v,
            lambda,
            b,
            r,
            r_prime,
        })
    }

    /// `C = {V <= r}`.
    pub fn c(&self) -> StateSet {
        sublevel(&self.v, self.r)
    }

    /// `C' = {V <= r'}`.
    pub fn c_prime(&self) -> StateSet {
        sublevel(&self.v, self.r_prime)
    }
}

fn sublevel(v: &[f64], r: f64) -> StateSet {
    StateSet::from_predicate(v.len(), |i| v[i] <= r)
}

fn check_params(lambda: f64, b: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameters("lambda must lie in [0, 1)"));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameters("b must be a finite real >= 0"));
    }
    Ok(())
}

fn check_v(v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameters("V must be finite and nonnegative"));
    }
    Ok(())
}

/// Outcome of a drift check.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftCheck {
    pub passes: bool,
    /// `min_x (lambda V(x) + b - (PV)(x))`.
    pub slack: f64,
    pub worst_state: usize,
    pub pv: Vec<f64>,
}

/// Checks `(PV)(x) <= lambda V(x) + b` at every state.
///
/// A state passes when its slack is at least `-1e-12 * max(1, lambda V(x) + b)`;
/// the relative form keeps the test meaningful when `V` spans many orders of
/// magnitude.
pub fn verify_drift(k: &FiniteKernel, v: &[f64], lambda: f64, b: f64) -> Result<DriftCheck> {
    check_params(lambda, b)?;
    check_v(v)?;
    if v.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: v.len(),
        });
    }
    let pv = k.apply(v);
    let mut passes = true;
    let (mut worst_state, mut slack) = (0, f64::INFINITY);
    for x in 0..k.n() {
        let rhs = lambda * v[x] + b;
        let s = rhs - pv[x];
        if s < -tol::BALANCE * rhs.max(1.0) {
            passes = false;
        }
        if s < slack {
            slack = s;
            worst_state = x;
        }
    }
    Ok(DriftCheck {
        passes,
        slack,
        worst_state,
        pv,
    })
}

/// `0, 0.05, ..., 0.95`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..20).map(|i| i as f64 * 0.05).collect()
}

/// Smallest `b(lambda) = max(0, max_x (PV)(x) - lambda V(x))` over the grid,
/// ties going to the smaller `lambda`.
pub fn fit_drift(k: &FiniteKernel, v: &[f64], lambda_grid: &[f64]) -> Result<(f64, f64)> {
    check_v(v)?;
    if v.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: v.len(),
        });
    }
    if lambda_grid.is_empty() || lambda_grid.iter().any(|l| !(0.0..1.0).contains(l)) {
        return Err(Error::InvalidParameters("lambda grid must be a nonempty subset of [0, 1)"));
    }
    let pv = k.apply(v);
    let mut best: Option<(f64, f64)> = None;
    for &lambda in lambda_grid {
        let b = pv
            .iter()
            .zip(v)
            .map(|(p, x)| p - lambda * x)
            .fold(0.0_f64, f64::max);
        let better = match best {
            None => true,
            Some((bl, bb)) => b < bb || (b == bb && lambda < bl),
        };
        if better {
            best = Some((lambda, b));
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Drift parameters of the lazy kernel: `((1 + lambda)/2, b/2)`.
pub fn lazy_drift_params(lambda: f64, b: f64) -> (f64, f64) {
    ((1.0 + lambda) / 2.0, b / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompatibilityMode {
    /// `r > 2b/(1 - lambda)`.
    Classic,
    /// `r' > 2b/(1 - lambda)` and `r > (2b + 24 r')/(1 - lambda)`.
    TwoRadius,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityReport {
    pub mode: CompatibilityMode,
    pub passes: bool,
    /// Threshold that `r` must exceed.
    pub r_threshold: f64,
    pub r_margin: f64,
    /// Threshold for `r'` (two-radius mode only).
    pub r_prime_threshold: Option<f64>,
    pub r_prime_margin: Option<f64>,
}

impl CompatibilityReport {
    /// Name of the first violated inequality, if any.
    pub fn violation(&self) -> Option<&'static str> {
        if self.r_prime_margin.is_some_and(|m| !(m > 0.0)) {
            return Some("r' > 2b/(1-lambda)");
        }
        if !(self.r_margin > 0.0) {
            return Some(match self.mode {
                CompatibilityMode::Classic => "r > 2b/(1-lambda)",
                CompatibilityMode::TwoRadius => "r > (2b+24r')/(1-lambda)",
            });
        }
        None
    }
}

pub fn compatibility_check(cert: &DriftCertificate, mode: CompatibilityMode) -> CompatibilityReport {
    let base = 2.0 * cert.b / (1.0 - cert.lambda);
    match mode {
        CompatibilityMode::Classic => CompatibilityReport {
            mode,
            passes: cert.r > base,
            r_threshold: base,
            r_margin: cert.r - base,
            r_prime_threshold: None,
            r_prime_margin: None,
        },
        CompatibilityMode::TwoRadius => {
            let r_threshold = (2.0 * cert.b + 24.0 * cert.r_prime) / (1.0 - cert.lambda);
            CompatibilityReport {
                mode,
                passes: cert.r_prime > base && cert.r > r_threshold,
                r_threshold,
                r_margin: cert.r - r_threshold,
                r_prime_threshold: Some(base),
                r_prime_margin: Some(cert.r_prime - base),
            }
        }
    }
}

/// `lambda^t V0 + b/(1 - lambda)`, an upper bound on `E[V(X_t)]`.
pub fn drift_envelope(lambda: f64, b: f64, v0: f64, t: u32) -> f64 {
    libm::pow(lambda, t as f64) * v0 + b / (1.0 - lambda)
}

/// `2r' / (r(1 - lambda) - b)`: bounds the probability of leaving
/// `{V <= r}` within the mixing window when started in `{V <= r'}`.
pub fn escape_bound(lambda: f64, b: f64, r: f64, r_prime: f64) -> Result<f64> {
    let denom = r * (1.0 - lambda) - b;
    if !(denom > 0.0) {
        return Err(Error::NonpositiveDenominator { value: denom });
    }
    Ok(2.0 * r_prime / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cert(lambda: f64, b: f64, r: f64, r_prime: f64) -> DriftCertificate {
        DriftCertificate::new(vec![0.0], lambda, b, r, r_prime).unwrap()
    }

    #[test]
    fn zero_lyapunov_always_passes() {
        let k = FiniteKernel::new(&[vec![0.3, 0.7], vec![0.6, 0.4]], None).unwrap();
        assert!(verify_drift(&k, &[0.0, 0.0], 0.0, 0.0).unwrap().passes);
    }

    #[test]
    fn identity_kernel_drift() {
        let v = [1.0, 4.0, 9.0];
        let k = FiniteKernel::identity(3);
        assert!(verify_drift(&k, &v, 0.9, 0.9).unwrap().passes);
        assert!(!verify_drift(&k, &v, 0.5, 0.1).unwrap().passes);
        assert!(verify_drift(&k, &v, 1.0, 0.0).is_err());
    }

    #[test]
    fn fit_on_identity_and_product_kernels() {
        let v = [0.2, 1.0];
        let (l, b) = fit_drift(&FiniteKernel::identity(2), &v, &[0.5, 0.99]).unwrap();
        assert_eq!(l, 0.99);
        assert!(b <= 0.01 + 1e-15);
        // (PV)(x) = E_pi V everywhere; with min V = 0 every lambda gives the
        // same b, so the tie goes to lambda = 0.
        let pi = [0.25, 0.75];
        let k = FiniteKernel::new(&[pi.to_vec(), pi.to_vec()], None).unwrap();
        let (l, b) = fit_drift(&k, &[0.0, 1.0], &default_lambda_grid()).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(b, 0.75);
    }

    #[test]
    fn lazy_params() {
        assert_eq!(lazy_drift_params(0.6, 2.0), (0.8, 1.0));
        assert_eq!(lazy_drift_params(0.0, 0.0), (0.5, 0.0));
    }

    #[test]
    fn compatibility_thresholds() {
        let r = compatibility_check(&cert(0.5, 1.0, 5.0, 0.0), CompatibilityMode::Classic);
        assert!(r.passes && r.r_threshold == 4.0);
        assert!(!compatibility_check(&cert(0.5, 1.0, 3.0, 0.0), CompatibilityMode::Classic).passes);
        let r = compatibility_check(&cert(0.5, 1.0, 250.0, 5.0), CompatibilityMode::TwoRadius);
        assert!(r.passes && r.r_threshold == 244.0);
        assert!(compatibility_check(&cert(0.5, 0.0, 1e-9, 0.0), CompatibilityMode::Classic).passes);
        let r = compatibility_check(&cert(0.5, 1.0, 240.0, 5.0), CompatibilityMode::TwoRadius);
        assert_eq!(r.violation(), Some("r > (2b+24r')/(1-lambda)"));
    }

    #[test]
    fn envelope_and_escape() {
        assert_eq!(drift_envelope(0.5, 1.0, 5.0, 0), 7.0);
        assert_eq!(drift_envelope(0.5, 1.0, 5.0, 3), 2.625);
        let e = escape_bound(0.5, 1.0, 250.0, 5.0).unwrap();
        assert!((e - 10.0 / 124.0).abs() < 1e-15 && e <= 1.0 / 12.0);
        assert_eq!(escape_bound(0.5, 1.0, 250.0, 0.0).unwrap(), 0.0);
        assert!(escape_bound(0.5, 1.0, 2.0, 1.0).is_err());
    }
}
