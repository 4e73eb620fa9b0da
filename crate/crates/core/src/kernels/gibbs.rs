use alloc::vec::Vec;

use super::{FiniteKernel, StateSet};
use crate::linalg::Matrix;
use crate::{Error, Result};

/// A normalized probability table on an `rows x cols` product grid. State
/// `(i, j)` has index `i * cols + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsTable {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl GibbsTable {
    /// Normalizes `weights` (row-major). Every cell must be positive.
    pub fn new(rows: usize, cols: usize, weights: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 || weights.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: weights.len(),
            });
        }
        if let Some(k) = weights.iter().position(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::ZeroProbabilityCell {
                row: k / cols,
                col: k % cols,
            });
        }
        let total: f64 = weights.iter().sum();
        Ok(Self {
            rows,
            cols,
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }
}

/// Random-scan Gibbs sampler for `table`: pick a coordinate uniformly among
/// those with more than one value and resample it from its conditional.
pub fn gibbs_grid_kernel(table: &GibbsTable) -> FiniteKernel {
    let support = StateSet::full(table.len());
    let p = gibbs_matrix(table, &support);
    FiniteKernel::from_matrix(p, None)
        .and_then(|k| k.with_reversible_wrt(table.probs().to_vec()))
        .expect("Gibbs kernel is stochastic and reversible")
}

/// Gibbs kernel of `table` conditioned on `support`, as a matrix indexed by
/// the members of `support` in increasing order. Axis activity follows the
/// full grid shape so that restrictions keep the same scan probabilities.
pub(crate) fn gibbs_matrix(table: &GibbsTable, support: &StateSet) -> Matrix {
    let members = support.indices();
    let mut local = alloc::vec![usize::MAX; table.len()];
    for (k, &s) in members.iter().enumerate() {
        local[s] = k;
    }
    let axes = usize::from(table.rows > 1) + usize::from(table.cols > 1);
    let m = members.len();
    let mut p = Matrix::zeros(m, m);
    if axes == 0 {
        return Matrix::identity(m);
    }
    let weight = 1.0 / axes as f64;
    for (a, &s) in members.iter().enumerate() {
        let (i, j) = (s / table.cols, s % table.cols);
        if table.rows > 1 {
            let line: Vec<usize> = (0..table.rows)
                .map(|ii| table.index(ii, j))
                .filter(|&t| support.contains(t))
                .collect();
            resample(&mut p, a, &line, table, &local, weight);
        }
        if table.cols > 1 {
            let line: Vec<usize> = (0..table.cols)
                .map(|jj| table.index(i, jj))
                .filter(|&t| support.contains(t))
                .collect();
            resample(&mut p, a, &line, table, &local, weight);
        }
    }
    p
}

fn resample(p: &mut Matrix, from: usize, line: &[usize], table: &GibbsTable, local: &[usize], weight: f64) {
    let mass: f64 = line.iter().map(|&t| table.probs[t]).sum();
    for &t in line {
        p[(from, local[t])] += weight * table.probs[t] / mass;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_row_table_samples_exactly() {
        let t = GibbsTable::new(1, 3, &[1.0, 2.0, 5.0]).unwrap();
        let k = gibbs_grid_kernel(&t);
        for x in 0..3 {
            for y in 0..3 {
                assert!((k.prob(x, y) - t.probs()[y]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_two_by_two() {
        let t = GibbsTable::new(2, 2, &[1.0; 4]).unwrap();
        let k = gibbs_grid_kernel(&t);
        // state 0 = (0,0): axis neighbours are 1 = (0,1) and 2 = (1,0); 3 is diagonal.
        assert_eq!(k.row(0), &[0.5, 0.25, 0.25, 0.0]);
        assert_eq!(k.row(3), &[0.0, 0.25, 0.25, 0.5]);
        for x in 0..4 {
            assert!((k.row(x).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_cell_rejected() {
        assert_eq!(
            GibbsTable::new(2, 2, &[1.0, 0.0, 1.0, 1.0]).unwrap_err(),
            Error::ZeroProbabilityCell { row: 0, col: 1 }
        );
    }

    #[test]
    fn detailed_balance_on_uneven_table() {
        let t = GibbsTable::new(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let k = gibbs_grid_kernel(&t);
        assert!(k.is_reversible_wrt(t.probs(), 1e-12));
        assert_eq!(k.reversible_wrt(), Some(t.probs()));
        let _ = vec![0];
    }
}
