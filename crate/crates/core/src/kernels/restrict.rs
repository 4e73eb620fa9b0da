use alloc::vec::Vec;
use core::fmt;

use super::gibbs::gibbs_matrix;
use super::{FiniteKernel, GibbsTable, StateSet};
use crate::analysis::stationary_distribution;
use crate::linalg::{Lu, Matrix};
use crate::{tol, Error, Result};

/// How a kernel is restricted to a subset `S`.
#[derive(Debug, Clone, Copy)]
pub enum Restriction<'t> {
    /// Moves leaving `S` are rejected and their mass held in place.
    Mh,
    /// The Gibbs sampler of the table conditioned on `S`.
    Gibbs(&'t GibbsTable),
    /// The censored chain watched only while in `S`.
    Trace,
}

impl Restriction<'_> {
    pub fn variant(&self) -> RestrictionVariant {
        match self {
            Restriction::Mh => RestrictionVariant::Mh,
            Restriction::Gibbs(_) => RestrictionVariant::Gibbs,
            Restriction::Trace => RestrictionVariant::Trace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictionVariant {
    Mh,
    Gibbs,
    Trace,
}

impl RestrictionVariant {
    pub fn name(self) -> &'static str {
        match self {
            RestrictionVariant::Mh => "mh-restriction",
            RestrictionVariant::Gibbs => "gibbs-restriction",
            RestrictionVariant::Trace => "trace",
        }
    }
}

impl fmt::Display for RestrictionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A kernel supported on `S` that is `S`-dominated by its base: its
/// stationary law is `pi(. | S)` and its transitions within `S` carry at
/// least the base's mass.
#[derive(Debug, Clone)]
pub struct DominatedKernel<'a> {
    variant: RestrictionVariant,
    base: &'a FiniteKernel,
    subset: StateSet,
    states: Vec<usize>,
    kernel: FiniteKernel,
}

impl<'a> DominatedKernel<'a> {
    pub fn variant(&self) -> RestrictionVariant {
        self.variant
    }

    pub fn base(&self) -> &'a FiniteKernel {
        self.base
    }

    pub fn subset(&self) -> &StateSet {
        &self.subset
    }

    /// Base index of each local state.
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// The restricted kernel, indexed by position in [`Self::states`].
    pub fn kernel(&self) -> &FiniteKernel {
        &self.kernel
    }

    pub fn local_index(&self, base_state: usize) -> Option<usize> {
        self.states.binary_search(&base_state).ok()
    }

    /// Restricted transition probability between two base states.
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        match (self.local_index(from), self.local_index(to)) {
            (Some(a), Some(b)) => self.kernel.prob(a, b),
            _ => 0.0,
        }
    }

    /// Checks `kernel(x, y) >= base(x, y) - tol` for all `x, y` in `S`.
    pub fn check_domination(&self, tolerance: f64) -> Result<()> {
        for (a, &x) in self.states.iter().enumerate() {
            for (b, &y) in self.states.iter().enumerate() {
                if self.kernel.prob(a, b) < self.base.prob(x, y) - tolerance {
                    return Err(Error::NotDominating { from: x, to: y });
                }
            }
        }
        Ok(())
    }

    /// Largest deviation between the restricted stationary law and
    /// `pi(. | S)`, where `pi` is the base's stationary law.
    pub fn stationarity_gap(&self) -> Result<f64> {
        let pi = stationary_distribution(self.base)?;
        let mass = self.subset.mass(&pi);
        let restricted = stationary_distribution(&self.kernel)?;
        Ok(self
            .states
            .iter()
            .zip(&restricted)
            .map(|(&x, r)| (pi[x] / mass - r).abs())
            .fold(0.0, f64::max))
    }
}

/// Restricts `base` to `subset`.
///
/// The Metropolis-Hastings variant needs a reversible base (otherwise the
/// rejection construction does not preserve `pi(. | S)`); the Gibbs variant
/// needs the table `base` was built from; the trace variant needs the
/// complement of `S` to be escapable.
pub fn restrict<'a>(base: &'a FiniteKernel, subset: &StateSet, how: Restriction<'_>) -> Result<DominatedKernel<'a>> {
    let n = base.n();
    if subset.universe() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: subset.universe(),
        });
    }
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let states = subset.indices();
    let matrix = match how {
        Restriction::Mh => mh_restriction(base, subset, &states)?,
        Restriction::Gibbs(table) => {
            if table.len() != n {
                return Err(Error::GridMismatch);
            }
            gibbs_matrix(table, subset)
        }
        Restriction::Trace => trace(base, subset, &states)?,
    };
    let coords = base.coords().map(|c| states.iter().map(|&i| c[i]).collect());
    let kernel = FiniteKernel::from_matrix(matrix, coords)?;
    Ok(DominatedKernel {
        variant: how.variant(),
        base,
        subset: subset.clone(),
        states,
        kernel,
    })
}

fn mh_restriction(base: &FiniteKernel, subset: &StateSet, states: &[usize]) -> Result<Matrix> {
    let reversible = match base.reversible_wrt() {
        Some(_) => true,
        None => {
            let pi = stationary_distribution(base)?;
            base.is_reversible_wrt(&pi, tol::EQUALITY)
        }
    };
    if !reversible {
        return Err(Error::NotReversible);
    }
    let m = states.len();
    let mut p = Matrix::zeros(m, m);
    for (a, &x) in states.iter().enumerate() {
        let mut escaped = 0.0;
        for &(y, q) in base.sparse_row(x) {
            if subset.contains(y) {
                p[(a, states.binary_search(&y).expect("member"))] += q;
            } else {
                escaped += q;
            }
        }
        p[(a, a)] += escaped;
    }
    Ok(p)
}

/// `P_SS + P_{S,S^c} (I - P_{S^c,S^c})^{-1} P_{S^c,S}`.
fn trace(base: &FiniteKernel, subset: &StateSet, states: &[usize]) -> Result<Matrix> {
    let outside = subset.complement().indices();
    let p = base.matrix();
    let mut out = p.select(states, states);
    if outside.is_empty() {
        return Ok(out);
    }
    let mut i_minus_q = p.select(&outside, &outside);
    for i in 0..outside.len() {
        for j in 0..outside.len() {
            i_minus_q[(i, j)] = if i == j { 1.0 } else { 0.0 } - i_minus_q[(i, j)];
        }
    }
    let lu = Lu::factor(i_minus_q).map_err(|_| Error::SingularCensoring)?;
    let exit = p.select(&outside, states);
    let enter = p.select(states, &outside);
    // Column b of (I - Q)^{-1} P_{S^c,S}: where an excursion re-enters S.
    let mut reentry = Matrix::zeros(outside.len(), states.len());
    for b in 0..states.len() {
        let col: Vec<f64> = (0..outside.len()).map(|i| exit[(i, b)]).collect();
        let sol = lu.solve(&col);
        for (i, v) in sol.into_iter().enumerate() {
            reentry[(i, b)] = v.max(0.0);
        }
    }
    let extra = enter.matmul(&reentry);
    for a in 0..states.len() {
        for b in 0..states.len() {
            out[(a, b)] += extra[(a, b)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn thirds() -> FiniteKernel {
        FiniteKernel::new(&[vec![1.0 / 3.0; 3], vec![1.0 / 3.0; 3], vec![1.0 / 3.0; 3]], None).unwrap()
    }

    #[test]
    fn mh_restriction_returns_escaping_mass_to_diagonal() {
        let k = thirds();
        let s = StateSet::from_indices(3, &[0, 1]);
        let d = restrict(&k, &s, Restriction::Mh).unwrap();
        assert!((d.kernel().prob(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.kernel().prob(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.kernel().prob(1, 1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn trace_of_thirds_is_halves() {
        let k = thirds();
        let s = StateSet::from_indices(3, &[0, 1]);
        let d = restrict(&k, &s, Restriction::Trace).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert!((d.kernel().prob(a, b) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn full_subset_leaves_kernel_unchanged() {
        let k = thirds();
        let s = StateSet::full(3);
        for how in [Restriction::Mh, Restriction::Trace] {
            let d = restrict(&k, &s, how).unwrap();
            assert_eq!(d.kernel().matrix(), k.matrix());
        }
        let table = GibbsTable::new(1, 3, &[1.0, 1.0, 1.0]).unwrap();
        let d = restrict(&k, &s, Restriction::Gibbs(&table)).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!((d.kernel().prob(a, b) - k.prob(a, b)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn empty_subset_rejected() {
        let k = thirds();
        assert_eq!(
            restrict(&k, &StateSet::empty(3), Restriction::Trace).unwrap_err(),
            Error::EmptySubset
        );
    }

    #[test]
    fn absorbing_complement_is_singular() {
        let k = FiniteKernel::new(&[vec![0.5, 0.5], vec![0.0, 1.0]], None).unwrap();
        let s = StateSet::from_indices(2, &[0]);
        assert_eq!(
            restrict(&k, &s, Restriction::Trace).unwrap_err(),
            Error::SingularCensoring
        );
    }

    #[test]
    fn mh_restriction_of_nonreversible_base_rejected() {
        let cyclic = FiniteKernel::new(
            &[vec![0.0, 0.9, 0.1], vec![0.1, 0.0, 0.9], vec![0.9, 0.1, 0.0]],
            None,
        )
        .unwrap();
        let s = StateSet::from_indices(3, &[0, 1]);
        assert_eq!(restrict(&cyclic, &s, Restriction::Mh).unwrap_err(), Error::NotReversible);
        assert!(restrict(&cyclic, &s, Restriction::Trace).is_ok());
    }

    #[test]
    fn gibbs_restriction_dominates() {
        let table = GibbsTable::new(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let k = super::super::gibbs_grid_kernel(&table);
        let s = StateSet::from_indices(6, &[0, 1, 4, 5]);
        let d = restrict(&k, &s, Restriction::Gibbs(&table)).unwrap();
        d.check_domination(1e-12).unwrap();
        assert!(d.stationarity_gap().unwrap() < 1e-12);
    }
}
