use crate::{Error, Result};

/// Interpolation exponent and rate balancing the overlap and drift terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub p: f64,
    pub rho: f64,
    /// `A = (1 + 2b + lambda r)/(1 + r)`.
    pub a: f64,
    /// `B = 1 + 2(lambda r + b)`.
    pub b_coef: f64,
    /// `|p_closed_form - p_bisection|`.
    pub bisection_gap: f64,
}

/// Solves `(1 - eps)^p = A^{1-p} B^p =: 1 - rho` for `p`.
///
/// The closed form is `p = ln A / (ln(1 - eps) + ln A - ln B)`; it is
/// cross-checked by bisection on `p ln(1 - eps) - (1 - p) ln A - p ln B`.
pub fn solve_contraction(eps: f64, lambda: f64, b: f64, r: f64) -> Result<Contraction> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameters("epsilon must lie in (0, 1)"));
    }
    if !(0.0..1.0).contains(&lambda) || !(b >= 0.0) || !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameters("need 0 <= lambda < 1, b >= 0, r > 0"));
    }
    let a = (1.0 + 2.0 * b + lambda * r) / (1.0 + r);
    if !(a < 1.0) {
        return Err(Error::IncompatibleRadius { a });
    }
    let b_coef = 1.0 + 2.0 * (lambda * r + b);
    let (ln_e, ln_a, ln_b) = (libm::log1p(-eps), libm::log(a), libm::log(b_coef));
    let p = ln_a / (ln_e + ln_a - ln_b);
    let f = |q: f64| q * ln_e - (1.0 - q) * ln_a - q * ln_b;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let gap = (p - 0.5 * (lo + hi)).abs();
    if gap > 1e-12 {
        return Err(Error::SolverDisagreement { gap });
    }
    let rho = -libm::expm1(p * ln_e);
    if !(p > 0.0 && p < 1.0 && rho > 0.0 && rho < 1.0) {
        return Err(Error::IncompatibleRadius { a });
    }
    Ok(Contraction {
        p,
        rho,
        a,
        b_coef,
        bisection_gap: gap,
    })
}

/// `(1 - eps)^{pt} + (1 + b/(1 - lambda) + V(x)) [A^{1-p} B^p]^t`.
pub fn bound_rhs(eps: f64, lambda: f64, b: f64, r: f64, p: f64, vx: f64, t: u64) -> f64 {
    let a = (1.0 + 2.0 * b + lambda * r) / (1.0 + r);
    let b_coef = 1.0 + 2.0 * (lambda * r + b);
    let t = t as f64;
    let drift_rate = libm::pow(a, 1.0 - p) * libm::pow(b_coef, p);
    libm::pow(1.0 - eps, p * t) + (1.0 + b / (1.0 - lambda) + vx) * libm::pow(drift_rate, t)
}

/// Which route produced a [`GeometricBound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    /// The restriction set is the whole space.
    PseudoMinorization,
    DriftAndHit,
}

impl BoundSource {
    pub fn name(self) -> &'static str {
        match self {
            BoundSource::PseudoMinorization => "pseudo-minorization",
            BoundSource::DriftAndHit => "drift-and-hit",
        }
    }
}

/// `TV(g(x, t, .), pi) <= M(x) (1 - rho)^{floor(t / steps)}` with
/// `M(x) = m_offset + V(x)`.
///
/// The contraction is solved for the `steps`-step kernel, so one unit of
/// the exponent is one block of `steps` transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricBound {
    pub epsilon: f64,
    /// Block length of the overlap (the mixing-time estimate plus one).
    pub steps: usize,
    pub p: f64,
    pub rho: f64,
    /// `2 + b/(1 - lambda)`.
    pub m_offset: f64,
    pub source: BoundSource,
}

impl GeometricBound {
    pub fn m(&self, vx: f64) -> f64 {
        self.m_offset + vx
    }

    pub fn eval(&self, vx: f64, t: u64) -> f64 {
        let blocks = t / self.steps as u64;
        self.m(vx) * libm::pow(1.0 - self.rho, blocks as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_instance() {
        let c = solve_contraction(1.0 / 3.0, 0.5, 1.0, 5.0).unwrap();
        assert!((c.p - 0.03383).abs() < 1e-5);
        assert!((c.rho - 0.013624).abs() < 1e-6);
        let lhs = libm::pow(2.0 / 3.0, c.p);
        let mid = libm::pow(c.a, 1.0 - c.p) * libm::pow(c.b_coef, c.p);
        assert!((lhs - mid).abs() < 1e-12 && (lhs - (1.0 - c.rho)).abs() < 1e-12);
    }

    #[test]
    fn near_threshold_stays_positive() {
        let c = solve_contraction(1.0 / 3.0, 0.5, 1.0, 4.0 + 1e-6).unwrap();
        assert!(c.p > 0.0 && c.rho > 0.0 && c.rho < 1e-6);
        assert!(matches!(
            solve_contraction(1.0 / 3.0, 0.5, 1.0, 4.0),
            Err(Error::IncompatibleRadius { .. })
        ));
    }

    #[test]
    fn eps_close_to_one() {
        let c = solve_contraction(0.999, 0.5, 1.0, 5.0).unwrap();
        let lhs = libm::pow(0.001, c.p);
        let mid = libm::pow(c.a, 1.0 - c.p) * libm::pow(c.b_coef, c.p);
        assert!((lhs - mid).abs() < 1e-10);
    }

    #[test]
    fn rhs_at_zero_and_monotone() {
        let c = solve_contraction(1.0 / 3.0, 0.5, 1.0, 5.0).unwrap();
        assert!((bound_rhs(1.0 / 3.0, 0.5, 1.0, 5.0, c.p, 3.0, 0) - 7.0).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for t in 0..50 {
            let v = bound_rhs(1.0 / 3.0, 0.5, 1.0, 5.0, c.p, 3.0, t);
            assert!(v < prev);
            prev = v;
        }
        let g = GeometricBound {
            epsilon: 1.0 / 3.0,
            steps: 1,
            p: c.p,
            rho: c.rho,
            m_offset: 4.0,
            source: BoundSource::PseudoMinorization,
        };
        for t in [0, 1, 17, 300] {
            let rhs = bound_rhs(1.0 / 3.0, 0.5, 1.0, 5.0, c.p, 3.0, t);
            assert!((g.eval(3.0, t) - rhs).abs() <= 1e-10 * rhs);
        }
    }
}
