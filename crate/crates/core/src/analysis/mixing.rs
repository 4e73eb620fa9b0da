use alloc::vec;
use alloc::vec::Vec;

use super::stationary::mixture_stationary;
use crate::kernels::{FiniteKernel, StateSet};
use crate::{tol, Error, Result};

/// Default total-variation threshold for mixing times.
pub const EPS_MIX: f64 = 0.25;

/// `1/2 sum |p_i - q_i|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    for v in [p, q] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > tol::NORMALIZED || v.iter().any(|x| *x < -tol::NORMALIZED) {
            return Err(Error::NotNormalized { sum });
        }
    }
    Ok(tv_unchecked(p, q))
}

pub(crate) fn tv_unchecked(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()).min(1.0)
}

/// `10 n^2 ceil(ln n)`, at least 10.
pub fn default_horizon(n: usize) -> usize {
    let log = libm::ceil(libm::log(n as f64)).max(1.0) as usize;
    (10 * n * n * log).max(10)
}

/// Worst-case distance to stationarity over starts in `starts`, for
/// `t = 0..=t_max`.
pub fn tv_profile(k: &FiniteKernel, starts: &StateSet, lazy: bool, t_max: usize) -> Result<Vec<f64>> {
    let mut profile = Vec::with_capacity(t_max + 1);
    walk_profile(k, starts, lazy, t_max, |d| {
        profile.push(d);
        false
    })?;
    Ok(profile)
}

/// Smallest `t <= t_max` with `max_{x in A} TV(P^t(x, .), pi) <= eps`,
/// by iterated vector-matrix products. `lazy` replaces `P` with
/// `1/2 P + 1/2 I`.
///
/// A reducible chain has no unique `pi`; its profile is measured against the
/// equal mixture of its closed classes' laws and it reports
/// [`Error::NotMixedByHorizon`] like any chain that fails to mix.
pub fn mixing_time(k: &FiniteKernel, eps: f64, starts: &StateSet, lazy: bool, t_max: usize) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameters("mixing threshold must lie in (0, 1)"));
    }
    let mut profile = Vec::new();
    let mut hit = None;
    walk_profile(k, starts, lazy, t_max, |d| {
        if d <= eps {
            hit = Some(profile.len());
            return true;
        }
        profile.push(d);
        false
    })?;
    hit.ok_or(Error::NotMixedByHorizon {
        horizon: t_max,
        profile,
    })
}

/// Feeds `d(t)` for `t = 0, 1, ...` to `visit` until it returns `true` or
/// `t_max` is reached.
fn walk_profile(
    k: &FiniteKernel,
    starts: &StateSet,
    lazy: bool,
    t_max: usize,
    mut visit: impl FnMut(f64) -> bool,
) -> Result<()> {
    if starts.universe() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: starts.universe(),
        });
    }
    if starts.is_empty() {
        return Err(Error::EmptySubset);
    }
    let pi = mixture_stationary(k);
    let kernel = if lazy { k.lazy() } else { k.clone() };
    let mut rows: Vec<Vec<f64>> = starts
        .indices()
        .into_iter()
        .map(|x| {
            let mut mu = vec![0.0; k.n()];
            mu[x] = 1.0;
            mu
        })
        .collect();
    for t in 0..=t_max {
        let d = rows.iter().map(|mu| tv_unchecked(mu, &pi)).fold(0.0, f64::max);
        if visit(d) || t == t_max {
            break;
        }
        for mu in rows.iter_mut() {
            *mu = kernel.push_forward(mu);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.25, 0.75]).unwrap(), 0.25);
        assert!(matches!(
            tv_distance(&[1.0], &[0.5, 0.5]).unwrap_err(),
            Error::LengthMismatch { .. }
        ));
        assert!(matches!(
            tv_distance(&[0.5, 0.6], &[0.5, 0.5]).unwrap_err(),
            Error::NotNormalized { .. }
        ));
    }

    #[test]
    fn one_step_exact_mixing() {
        let k = FiniteKernel::new(&[vec![0.5, 0.5], vec![0.5, 0.5]], None).unwrap();
        assert_eq!(mixing_time(&k, 0.25, &StateSet::full(2), false, 100).unwrap(), 1);
    }

    #[test]
    fn identity_never_mixes() {
        let k = FiniteKernel::new(&[vec![0.999, 0.001], vec![0.001, 0.999]], None).unwrap();
        let err = mixing_time(&k, 0.25, &StateSet::full(2), false, 20).unwrap_err();
        match err {
            Error::NotMixedByHorizon { horizon, profile } => {
                assert_eq!(horizon, 20);
                assert_eq!(profile.len(), 21);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = mixing_time(&FiniteKernel::identity(3), 0.25, &StateSet::full(3), false, 20).unwrap_err();
        assert!(matches!(err, Error::NotMixedByHorizon { horizon: 20, .. }));
        assert_eq!(mixing_time(&FiniteKernel::identity(1), 0.25, &StateSet::full(1), false, 20).unwrap(), 0);
    }

    #[test]
    fn horizon_formula() {
        assert_eq!(default_horizon(4), 10 * 16 * 2);
        assert_eq!(default_horizon(1), 10);
    }
}
