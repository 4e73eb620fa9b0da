use mcergo_core::analysis::{
    max_hitting_time, mixing_time, pseudo_minorization, stationary_distribution, tv_profile, HitStrategy, EPS_MIX,
};
use mcergo_core::certify::{
    compatibility_check, drift_envelope, escape_bound, fit_drift, lazy_drift_params, solve_contraction,
    verify_drift, CompatibilityMode, DriftCertificate,
};
use mcergo_core::kernels::{
    birth_death_chain, gibbs_grid_kernel, mh_grid_kernel, restrict, DensityKind, DensitySpec, GibbsTable, GridStep,
    Restriction,
};
use mcergo_core::{FiniteKernel, StateSet};
use proptest::prelude::*;

fn dense_kernel(max_n: usize) -> impl Strategy<Value = FiniteKernel> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, n), n).prop_map(|w| {
            let rows: Vec<Vec<f64>> = w
                .into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect();
            FiniteKernel::new(&rows, None).unwrap()
        })
    })
}

/// `P = W / rowsum(W)` for symmetric positive `W`, reversible w.r.t. the row sums.
fn reversible_kernel(max_n: usize) -> impl Strategy<Value = FiniteKernel> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.01f64..1.0, n * n).prop_map(move |w| {
            let sym = |i: usize, j: usize| w[i.min(j) * n + i.max(j)];
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let s: f64 = (0..n).map(|j| sym(i, j)).sum();
                    (0..n).map(|j| sym(i, j) / s).collect()
                })
                .collect();
            FiniteKernel::new(&rows, None).unwrap()
        })
    })
}

fn nonempty_subset(n: usize) -> impl Strategy<Value = StateSet> {
    (1u64..(1u64 << n)).prop_map(move |bits| StateSet::from_bits(n, bits))
}

fn tilted_bd(rate: f64, inv: u32) -> FiniteKernel {
    let psi = DensitySpec::new(DensityKind::ExpTilt { rate }, 0.25, 1.0e6).unwrap();
    birth_death_chain(&psi, GridStep::new(inv).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_restriction_is_dominated_and_stationary(
        (k, s) in dense_kernel(7).prop_flat_map(|k| { let n = k.n(); (Just(k), nonempty_subset(n)) })
    ) {
        let d = restrict(&k, &s, Restriction::Trace).unwrap();
        d.check_domination(1e-10).unwrap();
        prop_assert!(d.stationarity_gap().unwrap() < 1e-10);
    }

    #[test]
    fn mh_restriction_is_dominated_and_stationary(
        (k, s) in reversible_kernel(7).prop_flat_map(|k| { let n = k.n(); (Just(k), nonempty_subset(n)) })
    ) {
        let d = restrict(&k, &s, Restriction::Mh).unwrap();
        d.check_domination(1e-10).unwrap();
        prop_assert!(d.stationarity_gap().unwrap() < 1e-10);
    }

    #[test]
    fn gibbs_restriction_is_dominated_and_stationary(
        (rows, cols, probs, bits) in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(0.05f64..1.0, r * c), 1u64..(1u64 << (r * c)))
        })
    ) {
        let table = GibbsTable::new(rows, cols, &probs).unwrap();
        let k = gibbs_grid_kernel(&table);
        let s = StateSet::from_bits(rows * cols, bits);
        let d = restrict(&k, &s, Restriction::Gibbs(&table)).unwrap();
        d.check_domination(1e-10).unwrap();
        // The restricted Gibbs chain may split into closed classes when S is
        // disconnected along the axes; stationarity is then checked by balance.
        let pi = stationary_distribution(&k).unwrap();
        let mass = s.mass(&pi);
        let local: Vec<f64> = d.states().iter().map(|&x| pi[x] / mass).collect();
        let pushed = d.kernel().push_forward(&local);
        for (a, b) in local.iter().zip(&pushed) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn worst_case_tv_never_increases(k in dense_kernel(6)) {
        let profile = tv_profile(&k, &StateSet::full(k.n()), false, 60).unwrap();
        for w in profile.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn mh_kernel_satisfies_detailed_balance(
        (q, w) in reversible_kernel(6).prop_flat_map(|q| { let n = q.n(); (Just(q), prop::collection::vec(0.05f64..5.0, n)) })
    ) {
        let k = mh_grid_kernel(&w, &q).unwrap();
        let z: f64 = w.iter().sum();
        for x in 0..k.n() {
            for y in 0..k.n() {
                prop_assert!((w[x] / z * k.prob(x, y) - w[y] / z * k.prob(y, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pseudo_minorization_witness_holds(k in dense_kernel(6), steps in 1usize..4) {
        let r = pseudo_minorization(&k, &StateSet::full(k.n()), steps).unwrap();
        let total: f64 = r.mu.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(r.mu.iter().all(|m| *m >= 0.0));
        prop_assert!(r.max_violation() <= 1e-12);
    }

    #[test]
    fn fitted_drift_always_verifies(
        (k, v) in dense_kernel(5).prop_flat_map(|k| { let n = k.n(); (Just(k), prop::collection::vec(0.0f64..50.0, n)) })
    ) {
        let grid = mcergo_core::certify::default_lambda_grid();
        let (l, b) = fit_drift(&k, &v, &grid).unwrap();
        prop_assert!(verify_drift(&k, &v, l, b).unwrap().passes);
    }

    #[test]
    fn laziness_preserves_drift(
        (k, v) in dense_kernel(6).prop_flat_map(|k| { let n = k.n(); (Just(k), prop::collection::vec(0.0f64..50.0, n)) })
    ) {
        let (l, b) = fit_drift(&k, &v, &[0.3, 0.6, 0.9]).unwrap();
        let (l1, b1) = lazy_drift_params(l, b);
        prop_assert!(verify_drift(&k.lazy(), &v, l1, b1).unwrap().passes);
    }

    #[test]
    fn drift_envelope_bounds_expected_v(
        (k, v) in dense_kernel(6).prop_flat_map(|k| { let n = k.n(); (Just(k), prop::collection::vec(0.0f64..50.0, n)) })
    ) {
        let (l, b) = fit_drift(&k, &v, &mcergo_core::certify::default_lambda_grid()).unwrap();
        let mut pv = v.clone();
        for t in 0..=100u32 {
            for x in 0..k.n() {
                let env = drift_envelope(l, b, v[x], t);
                prop_assert!(pv[x] <= env * (1.0 + 1e-12) + 1e-12);
            }
            pv = k.apply(&pv);
        }
    }

    #[test]
    fn contraction_balances_both_sides(
        eps in 0.01f64..0.99, lambda in 0.0f64..0.99, b in 0.0f64..10.0, bump in 1e-3f64..100.0
    ) {
        let r = 2.0 * b / (1.0 - lambda) + bump;
        let c = solve_contraction(eps, lambda, b, r).unwrap();
        let lhs = (1.0 - eps).powf(c.p);
        let mid = c.a.powf(1.0 - c.p) * c.b_coef.powf(c.p);
        prop_assert!((lhs - mid).abs() < 1e-10);
        prop_assert!((lhs - (1.0 - c.rho)).abs() < 1e-10);
        prop_assert!(c.p > 0.0 && c.p < 1.0 && c.rho > 0.0 && c.rho < 1.0);
    }

    #[test]
    fn compatible_radii_keep_escape_small(
        lambda in 0.0f64..0.99, b in 0.0f64..10.0, extra_prime in 1e-6f64..50.0, extra in 1e-6f64..500.0
    ) {
        let r_prime = 2.0 * b / (1.0 - lambda) + extra_prime;
        let r = (2.0 * b + 24.0 * r_prime) / (1.0 - lambda) + extra;
        let cert = DriftCertificate::new(vec![0.0], lambda, b, r, r_prime).unwrap();
        prop_assert!(compatibility_check(&cert, CompatibilityMode::TwoRadius).passes);
        prop_assert!(escape_bound(lambda, b, r, r_prime).unwrap() <= 1.0 / 12.0);
    }

    #[test]
    fn mixing_bounds_hitting(k in dense_kernel(6)) {
        let t_m = mixing_time(&k, EPS_MIX, &StateSet::full(k.n()), false, 10_000).unwrap();
        let t_h = max_hitting_time(&k, 1.0 / 3.0, HitStrategy::Brute).unwrap().t_h;
        prop_assert!(t_h <= 12.0 * t_m as f64);
    }

    #[test]
    fn interval_search_matches_brute_force(rate in -6.0f64..6.0, inv in 2u32..=12, alpha in 0.05f64..0.6) {
        let k = tilted_bd(rate, inv);
        let brute = max_hitting_time(&k, alpha, HitStrategy::Brute).unwrap().t_h;
        let interval = max_hitting_time(&k, alpha, HitStrategy::Interval).unwrap().t_h;
        prop_assert!((brute - interval).abs() <= 1e-9 * brute.max(1.0));
    }

    #[test]
    fn drift_survives_restriction_to_sublevel_sets(rate in -8.0f64..-1.0, kappa in 0.2f64..1.5, level in 1usize..8) {
        let k = tilted_bd(rate, 10);
        let v: Vec<f64> = (0..10).map(|i| (kappa * i as f64).exp()).collect();
        let (l, b) = fit_drift(&k, &v, &mcergo_core::certify::default_lambda_grid()).unwrap();
        let r = v[level];
        let c = StateSet::from_predicate(10, |i| v[i] <= r);
        for how in [Restriction::Mh, Restriction::Trace] {
            let d = restrict(&k, &c, how).unwrap();
            let local: Vec<f64> = d.states().iter().map(|&i| v[i]).collect();
            prop_assert!(verify_drift(d.kernel(), &local, l, b).unwrap().passes);
        }
    }
}
