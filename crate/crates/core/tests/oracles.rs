//! Values frozen from an independent numpy/mpmath implementation.

use mcergo_core::analysis::{expected_hitting, max_hitting_time, HitStrategy};
use mcergo_core::certify::solve_contraction;
use mcergo_core::kernels::{birth_death_chain, lazy_srw, DensityKind, DensitySpec, GridStep};
use mcergo_core::StateSet;

const INVS: [u32; 4] = [8, 16, 32, 64];

fn t_h(k: &mcergo_core::FiniteKernel) -> f64 {
    max_hitting_time(k, 1.0 / 3.0, HitStrategy::Interval).unwrap().t_h
}

#[test]
fn uniform_birth_death_hitting_times() {
    let expected = [30.0, 110.0, 462.0, 1806.0];
    for (inv, e) in INVS.into_iter().zip(expected) {
        let k = birth_death_chain(&DensitySpec::uniform(), GridStep::new(inv).unwrap()).unwrap();
        assert!((t_h(&k) - e).abs() < 1e-8 * e, "inv {inv}");
    }
}

#[test]
fn tilted_birth_death_hitting_times() {
    let psi = DensitySpec::new(DensityKind::ExpTilt { rate: -1.0 }, 1.0 / 3.0, 2.0).unwrap();
    let expected = [34.675756459051556, 126.0645886011063, 479.6196325932867, 1869.839737380284];
    for (inv, e) in INVS.into_iter().zip(expected) {
        let k = birth_death_chain(&psi, GridStep::new(inv).unwrap()).unwrap();
        assert!((t_h(&k) - e).abs() < 1e-8 * e, "inv {inv}");
    }
}

#[test]
fn lazy_walk_hitting_times() {
    let expected = [60.0, 220.0, 924.0, 3612.0];
    for (inv, e) in INVS.into_iter().zip(expected) {
        let k = lazy_srw(GridStep::new(inv).unwrap());
        let got = t_h(&k);
        assert!((got - e).abs() < 1e-8 * e, "inv {inv}");
        assert!(got <= (inv * inv) as f64);
    }
}

#[test]
fn lazy_walk_quarter_grid_to_far_end() {
    let k = lazy_srw(GridStep::new(4).unwrap());
    let h = expected_hitting(&k, &StateSet::from_indices(4, &[3])).unwrap();
    for (got, e) in h.iter().zip([24.0, 20.0, 12.0, 0.0]) {
        assert!((got - e).abs() < 1e-10);
    }
}

#[test]
fn contraction_worked_instance_against_bisection() {
    let c = solve_contraction(1.0 / 3.0, 0.5, 1.0, 5.0).unwrap();
    assert!((c.p - 0.033831318138333821).abs() < 1e-12);
    assert!((c.rho - 0.013623763997829405).abs() < 1e-12);
}
