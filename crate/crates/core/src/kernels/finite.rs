use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;
use crate::{tol, Error, Result};

/// A subset of the states `0..n` of a finite chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    mask: Vec<bool>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        Self {
            mask: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            mask: vec![true; n],
        }
    }

    /// Set with the given members. Indices out of range are ignored.
    pub fn from_indices(n: usize, members: &[usize]) -> Self {
        let mut mask = vec![false; n];
        for &i in members {
            if i < n {
                mask[i] = true;
            }
        }
        Self { mask }
    }

    /// Set whose members are the one-bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            mask: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    /// The contiguous block `lo..=hi`.
    pub fn interval(n: usize, lo: usize, hi: usize) -> Self {
        Self {
            mask: (0..n).map(|i| i >= lo && i <= hi).collect(),
        }
    }

    pub fn from_predicate(n: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        Self {
            mask: (0..n).map(&mut pred).collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|m| *m)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|m| *m)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.then_some(i))
            .collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|m| !m).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        self.mask
            .iter()
            .enumerate()
            .all(|(i, m)| !m || other.contains(i))
    }

    /// Total mass of the set under `weights`.
    pub fn mass(&self, weights: &[f64]) -> f64 {
        self.mask
            .iter()
            .zip(weights)
            .filter(|(m, _)| **m)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Formats as `{0;2;5}`, which stays a single CSV field.
impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().into_iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// A validated row-stochastic transition matrix on an ordered finite state
/// space, optionally embedded in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernel {
    p: Matrix,
    coords: Option<Vec<f64>>,
    reversible_wrt: Option<Vec<f64>>,
    sparse: Vec<Vec<(usize, f64)>>,
}

impl FiniteKernel {
    /// Validates `rows` as a transition matrix.
    ///
    /// Rows whose sums deviate from one by at most `1e-9` are renormalized;
    /// larger deviations are rejected.
    pub fn new(rows: &[Vec<f64>], coords: Option<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Self::from_matrix(Matrix::from_rows(rows)?, coords)
    }

    pub fn from_matrix(mut p: Matrix, coords: Option<Vec<f64>>) -> Result<Self> {
        let n = p.rows();
        if n == 0 || p.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n.max(1),
                found: p.cols(),
            });
        }
        if n > tol::MAX_STATES {
            return Err(Error::TooManyStates {
                states: n,
                cap: tol::MAX_STATES,
            });
        }
        for i in 0..n {
            let row = p.row_mut(i);
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol::ROW_SUM_INPUT {
                return Err(Error::RowSumViolation { row: i, sum });
            }
            if sum != 1.0 {
                row.iter_mut().for_each(|v| *v /= sum);
            }
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
            let in_range = c.iter().all(|x| (0.0..=1.0).contains(x));
            let increasing = c.windows(2).all(|w| w[0] < w[1]);
            if !in_range || !increasing {
                return Err(Error::InvalidCoordinates);
            }
        }
        let sparse = (0..n)
            .map(|i| {
                p.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        Ok(Self {
            p,
            coords,
            reversible_wrt: None,
            sparse,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(Matrix::identity(n), None).expect("identity is stochastic")
    }

    /// Records `pi` as a detailed-balance witness after checking
    /// `pi_i P_ij = pi_j P_ji` within `1e-12`.
    pub fn with_reversible_wrt(mut self, pi: Vec<f64>) -> Result<Self> {
        if pi.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: pi.len(),
                right: self.n(),
            });
        }
        if !self.is_reversible_wrt(&pi, tol::BALANCE) {
            return Err(Error::NotReversible);
        }
        self.reversible_wrt = Some(pi);
        Ok(self)
    }

    pub fn is_reversible_wrt(&self, pi: &[f64], tolerance: f64) -> bool {
        let n = self.n();
        pi.len() == n
            && (0..n).all(|i| {
                (i + 1..n).all(|j| (pi[i] * self.p[(i, j)] - pi[j] * self.p[(j, i)]).abs() <= tolerance)
            })
    }

    pub fn n(&self) -> usize {
        self.p.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.p[(from, to)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.p.row(i)
    }

    /// Nonzero entries of row `i` as `(column, probability)`.
    pub fn sparse_row(&self, i: usize) -> &[(usize, f64)] {
        &self.sparse[i]
    }

    pub fn coords(&self) -> Option<&[f64]> {
        self.coords.as_deref()
    }

    pub fn reversible_wrt(&self) -> Option<&[f64]> {
        self.reversible_wrt.as_deref()
    }

    /// `1/2 P + 1/2 I`, keeping coordinates and any reversibility witness.
    pub fn lazy(&self) -> Self {
        let n = self.n();
        let mut q = self.p.clone();
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] *= 0.5;
            }
            q[(i, i)] += 0.5;
        }
        let mut out = Self::from_matrix(q, self.coords.clone()).expect("lazy transform is stochastic");
        out.reversible_wrt = self.reversible_wrt.clone();
        out
    }

    /// One step of the distribution: `mu P`.
    pub fn push_forward(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (i, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for &(j, p) in &self.sparse[i] {
                out[j] += m * p;
            }
        }
        out
    }

    /// `(P f)(x) = sum_y P(x, y) f(y)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.sparse
            .iter()
            .map(|row| row.iter().map(|&(j, p)| p * f[j]).sum())
            .collect()
    }

    /// Row `x` of `P^t`.
    pub fn t_step_row(&self, x: usize, t: usize) -> Vec<f64> {
        let mut mu = vec![0.0; self.n()];
        mu[x] = 1.0;
        for _ in 0..t {
            mu = self.push_forward(&mu);
        }
        mu
    }

    /// Draws the next state from row `i` using one uniform `u` in `[0, 1)`.
    pub fn next_state(&self, i: usize, u: f64) -> usize {
        let row = &self.sparse[i];
        let mut acc = 0.0;
        for &(j, p) in row {
            acc += p;
            if u < acc {
                return j;
            }
        }
        row.last().map_or(i, |&(j, _)| j)
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.n())
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn one_state_identity_is_valid() {
        let k = FiniteKernel::new(&[vec![1.0]], None).unwrap();
        assert_eq!(k.n(), 1);
        assert_eq!(k.prob(0, 0), 1.0);
    }

    #[test]
    fn symmetric_two_state_is_reversible_wrt_uniform() {
        let k = FiniteKernel::new(&[vec![0.5, 0.5], vec![0.5, 0.5]], None).unwrap();
        let k = k.with_reversible_wrt(vec![0.5, 0.5]).unwrap();
        assert_eq!(k.reversible_wrt(), Some(&[0.5, 0.5][..]));
    }

    #[test]
    fn row_sum_violation_rejected() {
        let err = FiniteKernel::new(&[vec![0.5, 0.6], vec![0.5, 0.5]], None).unwrap_err();
        assert!(matches!(err, Error::RowSumViolation { row: 0, .. }));
    }

    #[test]
    fn small_deviation_is_renormalized() {
        let k = FiniteKernel::new(&[vec![0.5, 0.5 + 5e-10], vec![0.0, 1.0]], None).unwrap();
        assert!(k.max_row_sum_error() <= tol::ROW_SUM);
    }

    #[test]
    fn negative_and_nonsquare_rejected() {
        let err = FiniteKernel::new(&[vec![1.5, -0.5], vec![0.5, 0.5]], None).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { row: 0, col: 1, .. }));
        let err = FiniteKernel::new(&[vec![0.5, 0.5]], None).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = FiniteKernel::new(&[vec![1.0]], Some(vec![0.0, 0.5])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn coordinates_must_increase() {
        let rows = [vec![0.5, 0.5], vec![0.5, 0.5]];
        assert_eq!(
            FiniteKernel::new(&rows, Some(vec![0.5, 0.25])).unwrap_err(),
            Error::InvalidCoordinates
        );
    }

    #[test]
    fn lazy_of_flip_is_uniform() {
        let k = FiniteKernel::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        let l = k.lazy();
        assert_eq!(l.row(0), &[0.5, 0.5]);
        assert_eq!(l.row(1), &[0.5, 0.5]);
        assert_eq!(FiniteKernel::identity(3).lazy(), FiniteKernel::identity(3));
    }

    #[test]
    fn next_state_inverts_cumulative_row() {
        let k = FiniteKernel::new(&[vec![0.25, 0.0, 0.75], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]], None).unwrap();
        assert_eq!(k.next_state(0, 0.1), 0);
        assert_eq!(k.next_state(0, 0.3), 2);
        assert_eq!(k.next_state(0, 0.999_999), 2);
    }

    #[test]
    fn state_set_display() {
        let s = StateSet::from_indices(6, &[0, 2, 5]);
        assert_eq!(alloc::format!("{s}"), "{0;2;5}");
        assert_eq!(s.complement().indices(), vec![1, 3, 4]);
        assert_eq!(StateSet::from_bits(4, 0b1010).indices(), vec![1, 3]);
    }
}
