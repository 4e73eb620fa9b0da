use alloc::vec::Vec;

use super::{DensitySpec, FiniteKernel};
use crate::analysis::stationary_distribution;
use crate::linalg::Matrix;
use crate::{tol, Error, Result};

/// Metropolis-Hastings kernel on the proposal's state space with target
/// weights `target` (unnormalized) and acceptance
/// `min{1, target(y) q(y, x) / (target(x) q(x, y))}`.
///
/// The proposal must be reversible with respect to a positive vector; the
/// output is reversible with respect to the normalized target.
pub fn mh_grid_kernel(target: &[f64], proposal: &FiniteKernel) -> Result<FiniteKernel> {
    let n = proposal.n();
    if target.len() != n {
        return Err(Error::GridMismatch);
    }
    if let Some((i, _)) = target.iter().enumerate().find(|(_, w)| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::DensityNonpositive {
            x: proposal.coords().map_or(i as f64, |c| c[i]),
        });
    }
    check_proposal_reversible(proposal)?;

    let mut p = Matrix::zeros(n, n);
    for x in 0..n {
        let mut moved = 0.0;
        for &(y, qxy) in proposal.sparse_row(x) {
            if y == x {
                continue;
            }
            let qyx = proposal.prob(y, x);
            let accept = (target[y] * qyx / (target[x] * qxy)).min(1.0);
            p[(x, y)] = qxy * accept;
            moved += qxy * accept;
        }
        p[(x, x)] = 1.0 - moved;
    }
    let total: f64 = target.iter().sum();
    let pi: Vec<f64> = target.iter().map(|w| w / total).collect();
    FiniteKernel::from_matrix(p, proposal.coords().map(<[f64]>::to_vec))?.with_reversible_wrt(pi)
}

/// [`mh_grid_kernel`] with the target read off `psi` at the proposal's
/// state coordinates.
pub fn mh_grid_kernel_density(psi: &DensitySpec, proposal: &FiniteKernel) -> Result<FiniteKernel> {
    let coords = proposal.coords().ok_or(Error::GridMismatch)?;
    let target: Vec<f64> = coords.iter().map(|&x| psi.eval(x)).collect();
    mh_grid_kernel(&target, proposal)
}

fn check_proposal_reversible(proposal: &FiniteKernel) -> Result<()> {
    if let Some(nu) = proposal.reversible_wrt() {
        if nu.iter().all(|v| *v > 0.0) {
            return Ok(());
        }
        return Err(Error::ProposalNotReversible);
    }
    let nu = stationary_distribution(proposal).map_err(|_| Error::ProposalNotReversible)?;
    if nu.iter().all(|v| *v > 0.0) && proposal.is_reversible_wrt(&nu, tol::EQUALITY) {
        Ok(())
    } else {
        Err(Error::ProposalNotReversible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half_half() -> FiniteKernel {
        FiniteKernel::new(&[vec![0.5, 0.5], vec![0.5, 0.5]], None).unwrap()
    }

    #[test]
    fn uniform_target_returns_symmetric_proposal() {
        let q = FiniteKernel::new(
            &[vec![0.2, 0.8, 0.0], vec![0.8, 0.1, 0.1], vec![0.0, 0.1, 0.9]],
            None,
        )
        .unwrap();
        let k = mh_grid_kernel(&[1.0, 1.0, 1.0], &q).unwrap();
        assert!(k.matrix().max_abs_diff(q.matrix()) < 1e-15);
    }

    #[test]
    fn two_state_hand_evaluation() {
        let k = mh_grid_kernel(&[1.0, 2.0], &half_half()).unwrap();
        assert_eq!(k.row(0), &[0.5, 0.5]);
        assert_eq!(k.row(1), &[0.25, 0.75]);
        // brute-force detailed balance against (1/3, 2/3)
        let pi = [1.0 / 3.0, 2.0 / 3.0];
        assert!((pi[0] * k.prob(0, 1) - pi[1] * k.prob(1, 0)).abs() < 1e-15);
    }

    #[test]
    fn nonreversible_proposal_rejected() {
        let cyclic = FiniteKernel::new(
            &[vec![0.0, 0.9, 0.1], vec![0.1, 0.0, 0.9], vec![0.9, 0.1, 0.0]],
            None,
        )
        .unwrap();
        assert_eq!(
            mh_grid_kernel(&[1.0, 2.0, 3.0], &cyclic).unwrap_err(),
            Error::ProposalNotReversible
        );
    }

    #[test]
    fn grid_mismatch() {
        assert_eq!(mh_grid_kernel(&[1.0], &half_half()).unwrap_err(), Error::GridMismatch);
        assert_eq!(
            mh_grid_kernel_density(&DensitySpec::uniform(), &half_half()).unwrap_err(),
            Error::GridMismatch
        );
    }
}
