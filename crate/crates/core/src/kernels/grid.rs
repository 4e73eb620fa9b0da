use alloc::vec::Vec;

use super::{DensitySpec, FiniteKernel};
use crate::linalg::Matrix;
use crate::{Error, Result};

/// A grid step `c` with `1/c` a positive integer. The grid is
/// `{0, c, 2c, ..., 1 - c}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridStep {
    inv: u32,
}

impl GridStep {
    /// Grid with `inv` points. Requires `inv >= 2`.
    pub fn new(inv: u32) -> Result<Self> {
        if inv < 2 {
            return Err(Error::InvalidGridStep { inv, min: 2 });
        }
        Ok(Self { inv })
    }

    /// Grid from a width `c`; `1/c` must be an integer to within `1e-9`.
    pub fn from_width(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameters("grid step must be positive"));
        }
        let inv = 1.0 / c;
        let rounded = libm::round(inv);
        if (inv - rounded).abs() > 1e-9 * rounded.max(1.0) || rounded > u32::MAX as f64 {
            return Err(Error::InvalidParameters("grid step must have an integer reciprocal"));
        }
        Self::new(rounded as u32)
    }

    pub fn inv(self) -> u32 {
        self.inv
    }

    pub fn width(self) -> f64 {
        1.0 / self.inv as f64
    }

    pub fn len(self) -> usize {
        self.inv as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn points(self) -> Vec<f64> {
        (0..self.inv).map(|i| i as f64 / self.inv as f64).collect()
    }
}

/// The Metropolized nearest-neighbour chain `h_c` for `psi` on the grid:
/// up-move `1/2 min{1, psi(x+c)/psi(x)}`, down-move
/// `1/2 min{1, psi(x-c)/psi(x)}`, remaining mass held.
///
/// The result carries the normalized grid values of `psi` as its
/// reversibility witness.
pub fn birth_death_chain(psi: &DensitySpec, step: GridStep) -> Result<FiniteKernel> {
    let n = step.len();
    let values = psi.grid_values(step.inv());
    if let Some((i, _)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::DensityNonpositive {
            x: i as f64 * step.width(),
        });
    }
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        let up = if i + 1 < n { 0.5 * (values[i + 1] / values[i]).min(1.0) } else { 0.0 };
        let down = if i > 0 { 0.5 * (values[i - 1] / values[i]).min(1.0) } else { 0.0 };
        if i + 1 < n {
            p[(i, i + 1)] = up;
        }
        if i > 0 {
            p[(i, i - 1)] = down;
        }
        p[(i, i)] = 1.0 - up - down;
    }
    let total: f64 = values.iter().sum();
    let pi = values.iter().map(|v| v / total).collect();
    FiniteKernel::from_matrix(p, Some(step.points()))?.with_reversible_wrt(pi)
}

/// The 1/2-lazy simple random walk `w_c` on the grid: hold 1/2, move to
/// each neighbour with probability 1/4, and hold any move that would leave
/// the grid. Stationary law is uniform.
pub fn lazy_srw(step: GridStep) -> FiniteKernel {
    birth_death_chain(&DensitySpec::uniform(), step)
        .expect("uniform density is positive")
        .lazy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::DensityKind;

    #[test]
    fn uniform_birth_death_interior_and_boundary() {
        let k = birth_death_chain(&DensitySpec::uniform(), GridStep::new(4).unwrap()).unwrap();
        assert_eq!(k.row(1), &[0.5, 0.0, 0.5, 0.0]);
        assert_eq!(k.row(2), &[0.0, 0.5, 0.0, 0.5]);
        assert_eq!(k.row(0), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(k.row(3), &[0.0, 0.0, 0.5, 0.5]);
        assert_eq!(k.coords().unwrap(), &[0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn tilted_birth_death_rates() {
        let psi = DensitySpec::new(DensityKind::ExpTilt { rate: -1.0 }, 0.25, 2.0).unwrap();
        let k = birth_death_chain(&psi, GridStep::new(4).unwrap()).unwrap();
        // 0.5 * exp(-0.25), evaluated independently to 17 digits.
        let up = 0.389_400_391_535_702_44;
        for i in 1..3 {
            assert!((k.prob(i, i + 1) - up).abs() < 1e-15);
            assert_eq!(k.prob(i, i - 1), 0.5);
        }
    }

    #[test]
    fn lazy_srw_two_states() {
        let w = lazy_srw(GridStep::new(2).unwrap());
        assert_eq!(w.row(0), &[0.75, 0.25]);
        assert_eq!(w.row(1), &[0.25, 0.75]);
    }

    #[test]
    fn grid_step_validation() {
        assert!(GridStep::new(1).is_err());
        assert_eq!(GridStep::from_width(0.125).unwrap().inv(), 8);
        assert!(GridStep::from_width(0.3).is_err());
    }
}
