use alloc::vec;
use alloc::vec::Vec;

use super::stationary_distribution;
use crate::kernels::{FiniteKernel, StateSet};
use crate::linalg::{Lu, Matrix};
use crate::{tol, Error, Result};

/// Expected first-entry times `E_x[tau(A)]` for every start `x`, with
/// `tau(A) = min{t >= 0 : X_t in A}`.
///
/// Solves `(I - Q) h = 1` on the complement of `A`. An empty target gives
/// `f64::INFINITY` everywhere.
pub fn expected_hitting(k: &FiniteKernel, target: &StateSet) -> Result<Vec<f64>> {
    let n = k.n();
    if target.universe() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.universe(),
        });
    }
    if target.is_empty() {
        return Ok(vec![f64::INFINITY; n]);
    }
    if let Some(state) = first_unreachable(k, target) {
        return Err(Error::Unreachable { state });
    }
    let outside = target.complement().indices();
    let mut h = vec![0.0; n];
    if outside.is_empty() {
        return Ok(h);
    }
    let mut a = Matrix::zeros(outside.len(), outside.len());
    for (i, &x) in outside.iter().enumerate() {
        for (j, &y) in outside.iter().enumerate() {
            a[(i, j)] = if i == j { 1.0 } else { 0.0 } - k.prob(x, y);
        }
    }
    let lu = Lu::factor(a)?;
    let sol = lu.solve(&vec![1.0; outside.len()]);
    for (&x, v) in outside.iter().zip(sol) {
        h[x] = v;
    }
    Ok(h)
}

/// Reverse breadth-first search from the target.
fn first_unreachable(k: &FiniteKernel, target: &StateSet) -> Option<usize> {
    let n = k.n();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        for &(y, _) in k.sparse_row(x) {
            reverse[y].push(x);
        }
    }
    let mut seen: Vec<bool> = (0..n).map(|i| target.contains(i)).collect();
    let mut queue = target.indices();
    while let Some(y) = queue.pop() {
        for &x in &reverse[y] {
            if !seen[x] {
                seen[x] = true;
                queue.push(x);
            }
        }
    }
    seen.iter().position(|s| !s)
}

/// Set family searched by [`max_hitting_time`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitStrategy {
    /// Every subset; exact, limited to 14 states.
    Brute,
    /// Contiguous windows in coordinate order; exact for birth-death chains.
    Interval,
}

/// How a maximum hitting time in a report was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HitMethod {
    Brute,
    Interval,
    /// Monte Carlo estimate with its standard error.
    MonteCarlo { stderr: f64 },
}

impl HitMethod {
    pub fn name(&self) -> &'static str {
        match self {
            HitMethod::Brute => "brute",
            HitMethod::Interval => "interval",
            HitMethod::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Maximum hitting time of large sets, with the maximizing set and start,
/// and optionally the chain's mixing and lazy mixing times.
#[derive(Debug, Clone, PartialEq)]
pub struct HitMixReport {
    pub alpha: f64,
    pub t_h: f64,
    pub method: HitMethod,
    pub worst_set: StateSet,
    pub worst_start: usize,
    pub t_m: Option<usize>,
    pub t_l: Option<usize>,
    pub eps_mix: f64,
}

impl HitMixReport {
    pub fn with_mixing_times(mut self, t_m: Option<usize>, t_l: Option<usize>) -> Self {
        self.t_m = t_m;
        self.t_l = t_l;
        self
    }
}

struct Candidate {
    value: f64,
    set: StateSet,
    start: usize,
}

/// `t_H(alpha) = sup { E_x[tau(A)] : x, pi(A) >= alpha }` over the family
/// selected by `strategy`.
///
/// Brute force visits subsets in increasing bit order and starts in
/// increasing order, keeping the first maximizer. The interval family is
/// searched through its minimal members: for each left end the shortest
/// window reaching mass `alpha` (hitting times only shrink as the target
/// grows), which covers every prefix, suffix, and window of mass `alpha`.
pub fn max_hitting_time(k: &FiniteKernel, alpha: f64, strategy: HitStrategy) -> Result<HitMixReport> {
    if !(alpha > 0.0) || alpha.is_nan() {
        return Err(Error::InvalidParameters("alpha must be positive"));
    }
    if alpha > 1.0 {
        return Err(Error::NoFeasibleSet { alpha });
    }
    let n = k.n();
    match strategy {
        HitStrategy::Brute if n > tol::MAX_BRUTE_STATES => {
            return Err(Error::TooManyStates {
                states: n,
                cap: tol::MAX_BRUTE_STATES,
            })
        }
        HitStrategy::Interval if k.coords().is_none() => return Err(Error::MissingCoordinates),
        _ => {}
    }
    let pi = stationary_distribution(k)?;
    let feasible = |set: &StateSet| set.mass(&pi) >= alpha - tol::BALANCE;
    let best = match strategy {
        HitStrategy::Brute => brute(k, n, &feasible)?,
        HitStrategy::Interval => {
            let mut best: Option<Candidate> = None;
            for lo in 0..n {
                let Some(hi) = (lo..n).find(|&hi| feasible(&StateSet::interval(n, lo, hi))) else {
                    break;
                };
                let set = StateSet::interval(n, lo, hi);
                consider(&mut best, k, set)?;
            }
            best
        }
    };
    let best = best.ok_or(Error::NoFeasibleSet { alpha })?;
    Ok(HitMixReport {
        alpha,
        t_h: best.value,
        method: match strategy {
            HitStrategy::Brute => HitMethod::Brute,
            HitStrategy::Interval => HitMethod::Interval,
        },
        worst_set: best.set,
        worst_start: best.start,
        t_m: None,
        t_l: None,
        eps_mix: super::EPS_MIX,
    })
}

fn consider(best: &mut Option<Candidate>, k: &FiniteKernel, set: StateSet) -> Result<()> {
    let h = expected_hitting(k, &set)?;
    let (start, value) = argmax(&h);
    if best.as_ref().map_or(true, |b| value > b.value) {
        *best = Some(Candidate { value, set, start });
    }
    Ok(())
}

fn argmax(h: &[f64]) -> (usize, f64) {
    h.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b })
}

#[cfg(not(feature = "parallel"))]
fn brute(k: &FiniteKernel, n: usize, feasible: &impl Fn(&StateSet) -> bool) -> Result<Option<Candidate>> {
    let mut best = None;
    for bits in 1u64..(1u64 << n) {
        let set = StateSet::from_bits(n, bits);
        if feasible(&set) {
            consider(&mut best, k, set)?;
        }
    }
    Ok(best)
}

#[cfg(feature = "parallel")]
fn brute(
    k: &FiniteKernel,
    n: usize,
    feasible: &(impl Fn(&StateSet) -> bool + Sync),
) -> Result<Option<Candidate>> {
    use rayon::prelude::*;
    let scored: Vec<Option<(f64, u64, usize)>> = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|bits| {
            let set = StateSet::from_bits(n, bits);
            if !feasible(&set) {
                return Ok(None);
            }
            let (start, value) = argmax(&expected_hitting(k, &set)?);
            Ok(Some((value, bits, start)))
        })
        .collect::<Result<_>>()?;
    // Sequential reduction keeps the first maximizer in bit order.
    let mut best: Option<(f64, u64, usize)> = None;
    for s in scored.into_iter().flatten() {
        if best.map_or(true, |b| s.0 > b.0) {
            best = Some(s);
        }
    }
    Ok(best.map(|(value, bits, start)| Candidate {
        value,
        set: StateSet::from_bits(n, bits),
        start,
    }))
}

/// `12 t_m`, an upper bound on `t_H(1/3)` for any chain: after `t_m` steps
/// every set of mass `1/3` is hit with probability at least `1/12`, so the
/// number of `t_m`-blocks before hitting is dominated by a geometric
/// variable with mean 12.
pub fn mix_to_hit_bound(t_m: usize) -> f64 {
    12.0 * t_m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn path3() -> FiniteKernel {
        FiniteKernel::new(&[vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0]], None).unwrap()
    }

    #[test]
    fn reflecting_path_hand_solve() {
        let h = expected_hitting(&path3(), &StateSet::from_indices(3, &[2])).unwrap();
        assert!((h[0] - 4.0).abs() < 1e-12);
        assert!((h[1] - 3.0).abs() < 1e-12);
        assert_eq!(h[2], 0.0);
    }

    #[test]
    fn empty_target_is_infinite() {
        let h = expected_hitting(&path3(), &StateSet::empty(3)).unwrap();
        assert!(h.iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn unreachable_target() {
        let k = FiniteKernel::new(&[vec![1.0, 0.0], vec![0.5, 0.5]], None).unwrap();
        assert_eq!(
            expected_hitting(&k, &StateSet::from_indices(2, &[1])).unwrap_err(),
            Error::Unreachable { state: 0 }
        );
    }

    #[test]
    fn flip_chain_brute() {
        let k = FiniteKernel::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        let r = max_hitting_time(&k, 0.4, HitStrategy::Brute).unwrap();
        assert_eq!(r.t_h, 1.0);
        assert_eq!(r.worst_set, StateSet::from_indices(2, &[0]));
        assert_eq!(r.worst_start, 1);
    }

    #[test]
    fn only_full_space_feasible_gives_zero() {
        let k = FiniteKernel::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        let r = max_hitting_time(&k, 0.9, HitStrategy::Brute).unwrap();
        assert_eq!(r.t_h, 0.0);
        assert!(r.worst_set.is_full());
    }

    #[test]
    fn alpha_validation() {
        let k = path3();
        assert_eq!(
            max_hitting_time(&k, 1.5, HitStrategy::Brute).unwrap_err(),
            Error::NoFeasibleSet { alpha: 1.5 }
        );
        assert_eq!(max_hitting_time(&k, 0.5, HitStrategy::Interval).unwrap_err(), Error::MissingCoordinates);
        let big = crate::kernels::lazy_srw(crate::kernels::GridStep::new(15).unwrap());
        assert_eq!(
            max_hitting_time(&big, 0.5, HitStrategy::Brute).unwrap_err(),
            Error::TooManyStates { states: 15, cap: 14 }
        );
    }

    #[test]
    fn mix_to_hit_values() {
        assert_eq!(mix_to_hit_bound(0), 0.0);
        assert_eq!(mix_to_hit_bound(10), 120.0);
    }
}
