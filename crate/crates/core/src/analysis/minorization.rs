use alloc::vec::Vec;

use super::mixing::tv_unchecked;
use crate::kernels::{FiniteKernel, StateSet};
use crate::{tol, Error, Result};

/// Pairwise overlap witness for the `T`-step kernel on a set `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorizationReport {
    pub set: StateSet,
    pub steps: usize,
    /// `1 - max_{x,y in S} TV(P^T(x, .), P^T(y, .))`.
    pub epsilon: f64,
    pub worst_pair: (usize, usize),
    /// `C_xy = {z : P^T(x, z) > P^T(y, z)}` for the worst pair.
    pub overlap_set: StateSet,
    /// The minorizing measure `mu_xy` of the worst pair.
    pub mu: Vec<f64>,
    pub row_x: Vec<f64>,
    pub row_y: Vec<f64>,
}

impl MinorizationReport {
    /// Largest violation of `P^T(x, .) >= eps mu` and `P^T(y, .) >= eps mu`
    /// for the worst pair (zero or negative when both hold).
    pub fn max_violation(&self) -> f64 {
        self.mu
            .iter()
            .zip(self.row_x.iter().zip(&self.row_y))
            .map(|(m, (a, b))| (self.epsilon * m - a).max(self.epsilon * m - b))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Computes the pseudo-minorization constant of `P^T` on `set` and
/// materializes `mu_xy` for the pair with the least overlap:
///
/// `mu_xy(A) = [P^T(y, A ∩ C) + P^T(x, A \ C)] / [P^T(y, C) + P^T(x, C^c)]`.
///
/// Ties keep the first pair in lexicographic order.
pub fn pseudo_minorization(k: &FiniteKernel, set: &StateSet, steps: usize) -> Result<MinorizationReport> {
    if set.universe() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: set.universe(),
        });
    }
    if set.is_empty() {
        return Err(Error::EmptySubset);
    }
    if steps == 0 {
        return Err(Error::InvalidParameters("step count must be at least 1"));
    }
    let members = set.indices();
    let rows: Vec<Vec<f64>> = members.iter().map(|&x| k.t_step_row(x, steps)).collect();
    let mut worst = (0, 0, 0.0_f64);
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            let d = tv_unchecked(&rows[a], &rows[b]);
            if d > worst.2 {
                worst = (a, b, d);
            }
        }
    }
    let (a, b, max_tv) = worst;
    let epsilon = 1.0 - max_tv;
    if epsilon <= tol::BALANCE {
        return Err(Error::DegenerateOverlap { max_tv });
    }
    let (row_x, row_y) = (&rows[a], &rows[b]);
    let overlap_set = StateSet::from_predicate(k.n(), |z| row_x[z] > row_y[z]);
    let numer: Vec<f64> = (0..k.n())
        .map(|z| if overlap_set.contains(z) { row_y[z] } else { row_x[z] })
        .collect();
    let denom: f64 = numer.iter().sum();
    let mu = numer.iter().map(|v| v / denom).collect();
    Ok(MinorizationReport {
        set: set.clone(),
        steps,
        epsilon,
        worst_pair: (members[a], members[b]),
        overlap_set,
        mu,
        row_x: row_x.clone(),
        row_y: row_y.clone(),
    })
}
