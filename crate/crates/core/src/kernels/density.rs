use alloc::vec::Vec;

use crate::{tol, Error, Result};

/// Family of a positive density on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    Uniform,
    /// `psi(x) = exp(rate * x)`; `rate = -1` gives `psi ∝ e^{-x}`.
    ExpTilt { rate: f64 },
    /// Linear interpolation through `(x, y)` knots spanning `[0, 1]`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

/// A positive (unnormalized) density `psi` on `[0, 1]` together with its
/// declared near-unimodality parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    kind: DensityKind,
    unimodal_alpha: f64,
    unimodal_ratio: f64,
    normalizer: f64,
}

const POSITIVITY_PROBES: usize = 1024;

impl DensitySpec {
    pub fn new(kind: DensityKind, unimodal_alpha: f64, unimodal_ratio: f64) -> Result<Self> {
        if !(unimodal_alpha > 0.0 && unimodal_alpha < 0.5) {
            return Err(Error::InvalidDensity("unimodal alpha must lie in (0, 0.5)"));
        }
        if !(unimodal_ratio >= 1.0) || !unimodal_ratio.is_finite() {
            return Err(Error::InvalidDensity("unimodal ratio must be a finite real >= 1"));
        }
        match &kind {
            DensityKind::Uniform => {}
            DensityKind::ExpTilt { rate } => {
                if !rate.is_finite() || rate.abs() > 700.0 {
                    return Err(Error::InvalidDensity("tilt rate must be finite and |rate| <= 700"));
                }
            }
            DensityKind::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidDensity("piecewise-linear table needs two knots"));
                }
                let first = knots[0].0;
                let last = knots[knots.len() - 1].0;
                if first != 0.0 || last != 1.0 {
                    return Err(Error::InvalidDensity("piecewise-linear knots must span [0, 1]"));
                }
                if !knots.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(Error::InvalidDensity("piecewise-linear knots must increase"));
                }
                if let Some(&(x, _)) = knots.iter().find(|(_, y)| !(*y > 0.0) || !y.is_finite()) {
                    return Err(Error::DensityNonpositive { x });
                }
            }
        }
        let mut spec = Self {
            kind,
            unimodal_alpha,
            unimodal_ratio,
            normalizer: 1.0,
        };
        for i in 0..=POSITIVITY_PROBES {
            let x = i as f64 / POSITIVITY_PROBES as f64;
            let v = spec.eval(x);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::DensityNonpositive { x });
            }
        }
        spec.normalizer = spec.integrate(0.0, 1.0);
        Ok(spec)
    }

    pub fn uniform() -> Self {
        Self::new(DensityKind::Uniform, 1.0 / 3.0, 1.0).expect("uniform density is valid")
    }

    /// `psi ∝ exp(rate x)`, with the near-unimodality ratio set to the exact
    /// central ratio at `alpha`.
    pub fn exp_tilt(rate: f64, alpha: f64) -> Result<Self> {
        let draft = Self::new(DensityKind::ExpTilt { rate }, alpha, 1.0)?;
        let ratio = draft.central_ratio(alpha, 4096)?;
        Self::new(DensityKind::ExpTilt { rate }, alpha, ratio)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn unimodal_alpha(&self) -> f64 {
        self.unimodal_alpha
    }

    pub fn unimodal_ratio(&self) -> f64 {
        self.unimodal_ratio
    }

    /// `Z = ∫_0^1 psi`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Unnormalized density; `x` is clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.kind {
            DensityKind::Uniform => 1.0,
            DensityKind::ExpTilt { rate } => libm::exp(rate * x),
            DensityKind::PiecewiseLinear { knots } => {
                let k = knots.partition_point(|(kx, _)| *kx <= x);
                if k == 0 {
                    return knots[0].1;
                }
                if k == knots.len() {
                    return knots[k - 1].1;
                }
                let (x0, y0) = knots[k - 1];
                let (x1, y1) = knots[k];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.eval(x) / self.normalizer
    }

    /// `∫_a^b psi` by adaptive Simpson quadrature.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let f = |x: f64| self.eval(x);
        // Kinks of a piecewise-linear table are integrated piece by piece.
        let mut breaks = alloc::vec![a];
        if let DensityKind::PiecewiseLinear { knots } = &self.kind {
            breaks.extend(knots.iter().map(|k| k.0).filter(|x| *x > a && *x < b));
        }
        breaks.push(b);
        breaks
            .windows(2)
            .map(|w| adaptive_simpson(&f, w[0], w[1], tol::QUADRATURE * 1e-3, 48))
            .sum()
    }

    /// Normalized mass of `[0, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        (self.integrate(0.0, x.clamp(0.0, 1.0)) / self.normalizer).clamp(0.0, 1.0)
    }

    /// The `q`-th quantile `m(psi, q)`, by bisection on the CDF to `1e-8`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameters("quantile level must lie in (0, 1)"));
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > tol::QUADRATURE * 0.5 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `max psi / min psi` over `[m(psi, alpha), m(psi, 1 - alpha)]`, from
    /// `samples + 1` equispaced evaluations.
    pub fn central_ratio(&self, alpha: f64, samples: usize) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidParameters("alpha must lie in (0, 0.5)"));
        }
        let lo = self.quantile(alpha)?;
        let hi = self.quantile(1.0 - alpha)?;
        let samples = samples.max(1);
        let (mut min, mut max) = (f64::INFINITY, 0.0_f64);
        for i in 0..=samples {
            let v = self.eval(lo + (hi - lo) * i as f64 / samples as f64);
            min = min.min(v);
            max = max.max(v);
        }
        Ok(max / min)
    }

    /// Whether the declared ratio bounds `psi(x)/psi(y)` on the declared
    /// inter-quantile interval, checked by dense sampling.
    pub fn check_near_unimodal(&self) -> Result<bool> {
        let observed = self.central_ratio(self.unimodal_alpha, 4096)?;
        Ok(observed <= self.unimodal_ratio * (1.0 + 1e-12))
    }

    /// `psi` at the grid points `0, c, ..., 1 - c`.
    pub fn grid_values(&self, inv_c: u32) -> Vec<f64> {
        (0..inv_c).map(|i| self.eval(i as f64 / inv_c as f64)).collect()
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    refine(f, a, b, fa, fm, fb, whole, eps, depth)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exp_tilt_normalizer_matches_closed_form() {
        let d = DensitySpec::new(DensityKind::ExpTilt { rate: -1.0 }, 0.25, 2.0).unwrap();
        let exact = 1.0 - libm::exp(-1.0);
        assert!((d.normalizer() - exact).abs() < 1e-12);
        assert!((d.cdf(1.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quantiles_of_uniform_and_tilt() {
        let u = DensitySpec::uniform();
        assert!((u.quantile(0.3).unwrap() - 0.3).abs() < 1e-8);
        let d = DensitySpec::new(DensityKind::ExpTilt { rate: -1.0 }, 0.25, 2.0).unwrap();
        // F(x) = (1 - e^{-x}) / (1 - e^{-1}) inverted by hand.
        let q = 0.5;
        let exact = -libm::log(1.0 - q * (1.0 - libm::exp(-1.0)));
        assert!((d.quantile(q).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn piecewise_linear_integrates_exactly() {
        let d = DensitySpec::new(
            DensityKind::PiecewiseLinear {
                knots: vec![(0.0, 1.0), (0.5, 3.0), (1.0, 1.0)],
            },
            0.25,
            3.0,
        )
        .unwrap();
        assert!((d.normalizer() - 2.0).abs() < 1e-12);
        assert!((d.eval(0.25) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_tables() {
        let err = DensitySpec::new(
            DensityKind::PiecewiseLinear {
                knots: vec![(0.0, 1.0), (1.0, 0.0)],
            },
            0.25,
            2.0,
        )
        .unwrap_err();
        assert_eq!(err, Error::DensityNonpositive { x: 1.0 });
    }

    #[test]
    fn central_ratio_of_tilt() {
        let d = DensitySpec::exp_tilt(-1.0, 1.0 / 3.0).unwrap();
        let lo = d.quantile(1.0 / 3.0).unwrap();
        let hi = d.quantile(2.0 / 3.0).unwrap();
        assert!((d.unimodal_ratio() - libm::exp(hi - lo)).abs() < 1e-6);
        assert!(d.check_near_unimodal().unwrap());
    }
}
