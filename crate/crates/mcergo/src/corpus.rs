//! Built-in chains used by the experiments and the acceptance suite.

use mcergo_core::certify::{fit_drift, verify_drift, DriftCertificate};
use mcergo_core::kernels::{birth_death_chain, lazy_srw, DensitySpec, GibbsTable, GridStep};
use mcergo_core::FiniteKernel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};

/// A corpus chain with its drift certificate, when it has one.
#[derive(Debug, Clone)]
pub struct CorpusChain {
    pub name: String,
    pub kernel: FiniteKernel,
    pub certificate: Option<DriftCertificate>,
    pub table: Option<GibbsTable>,
}

pub const NAMES: &[&str] = &[
    "bd-expdrift",
    "flip",
    "path3",
    "identity2",
    "lazy-srw-8",
    "bd-uniform-16",
    "gibbs-3x3",
];

pub fn by_name(name: &str) -> Result<CorpusChain> {
    let plain = |kernel| CorpusChain {
        name: name.to_string(),
        kernel,
        certificate: None,
        table: None,
    };
    let rows = |r: &[&[f64]]| -> FiniteKernel {
        let r: Vec<Vec<f64>> = r.iter().map(|x| x.to_vec()).collect();
        FiniteKernel::new(&r, None).expect("corpus rows are stochastic")
    };
    Ok(match name {
        "bd-expdrift" => bd_expdrift(),
        "flip" => plain(rows(&[&[0.0, 1.0], &[1.0, 0.0]])),
        "path3" => plain(rows(&[&[0.0, 1.0, 0.0], &[0.5, 0.0, 0.5], &[0.0, 1.0, 0.0]])),
        "identity2" => plain(FiniteKernel::identity(2)),
        "lazy-srw-8" => plain(lazy_srw(GridStep::new(8).expect("valid step"))),
        "bd-uniform-16" => plain(
            birth_death_chain(&DensitySpec::uniform(), GridStep::new(16).expect("valid step")).expect("uniform grid"),
        ),
        "gibbs-3x3" => {
            let table =
                GibbsTable::new(3, 3, &[1.0, 2.0, 1.0, 2.0, 4.0, 2.0, 1.0, 2.0, 1.0]).expect("positive table");
            CorpusChain {
                name: name.to_string(),
                kernel: mcergo_core::kernels::gibbs_grid_kernel(&table),
                certificate: None,
                table: Some(table),
            }
        }
        _ => return Err(HarnessError::config(format!("unknown corpus chain {name:?}"))),
    })
}

/// Birth-death chain on `c = 1/32` for `psi ∝ exp(-64 x)` with
/// `V(i) = exp(i)`: steep enough that the drift holds with `lambda < 1`
/// well away from the origin.
pub fn bd_expdrift() -> CorpusChain {
    drift_chain("bd-expdrift", -64.0, 1.0, 32)
}

/// The birth-death chain for `psi ∝ exp(rate x)` on `1/inv` with
/// `V(i) = exp(kappa i)` and a certificate compatible in the two-radius sense.
pub fn drift_chain(name: &str, rate: f64, kappa: f64, inv: u32) -> CorpusChain {
    let psi = DensitySpec::exp_tilt(rate, 1.0 / 3.0).expect("tilt density");
    let kernel = birth_death_chain(&psi, GridStep::new(inv).expect("valid step")).expect("tilted grid");
    let v: Vec<f64> = (0..kernel.n()).map(|i| (kappa * i as f64).exp()).collect();
    let certificate = Some(compatible_certificate(&kernel, v));
    CorpusChain {
        name: name.to_string(),
        kernel,
        certificate,
        table: None,
    }
}

/// Picks `lambda` on a 0.05 grid minimizing `2b/(1 - lambda)`, then radii
/// 10% above the two-radius thresholds.
pub fn compatible_certificate(k: &FiniteKernel, v: Vec<f64>) -> DriftCertificate {
    let mut best: Option<(f64, f64)> = None;
    for i in 0..20 {
        let lambda = i as f64 * 0.05;
        let (l, b) = fit_drift(k, &v, &[lambda]).expect("valid V");
        if !verify_drift(k, &v, l, b).expect("valid params").passes {
            continue;
        }
        if best.is_none_or(|(bl, bb)| b / (1.0 - l) < bb / (1.0 - bl)) {
            best = Some((l, b));
        }
    }
    let (lambda, b) = best.expect("some lambda is feasible");
    let r_prime = 1.1 * (2.0 * b / (1.0 - lambda)).max(1e-9);
    let r = 1.1 * (2.0 * b + 24.0 * r_prime) / (1.0 - lambda);
    DriftCertificate::new(v, lambda, b, r, r_prime).expect("finite parameters")
}

/// `(rate, kappa, 1/c)` of the ten escape-test chains.
pub const ESCAPE_GRID: [(f64, f64, u32); 10] = [
    (-64.0, 1.0, 32),
    (-48.0, 1.0, 32),
    (-80.0, 1.0, 32),
    (-96.0, 1.0, 32),
    (-64.0, 0.8, 32),
    (-64.0, 1.2, 32),
    (-32.0, 1.0, 16),
    (-48.0, 1.0, 16),
    (-128.0, 1.0, 64),
    (-64.0, 0.6, 32),
];

pub fn escape_corpus() -> Vec<CorpusChain> {
    ESCAPE_GRID
        .iter()
        .map(|&(rate, kappa, inv)| drift_chain(&format!("bd-drift[rate={rate},kappa={kappa},c=1/{inv}]"), rate, kappa, inv))
        .collect()
}

/// An irreducible, aperiodic random chain: a directed cycle through all
/// states, a positive holding probability at state 0, and extra edges
/// with probability `density`.
pub fn random_chain(n: usize, density: f64, seed: u64) -> FiniteKernel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut w: Vec<f64> = (0..n)
                .map(|_| if rng.random::<f64>() < density { rng.random_range(0.05..1.0) } else { 0.0 })
                .collect();
            w[(i + 1) % n] += rng.random_range(0.1..1.0);
            if i == 0 {
                w[0] += rng.random_range(0.1..1.0);
            }
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect();
    FiniteKernel::new(&rows, None).expect("normalized rows")
}

/// `count` random chains with sizes cycling through `2..=max_n`.
pub fn random_corpus(count: usize, max_n: usize, seed: u64) -> Vec<FiniteKernel> {
    (0..count)
        .map(|i| {
            let n = 2 + i % (max_n - 1);
            random_chain(n, 0.4, seed.wrapping_add(i as u64))
        })
        .collect()
}

/// A reversible random chain `W / rowsum(W)` for symmetric positive `W`
/// with some entries removed (the cycle edges are kept).
pub fn random_reversible_chain(n: usize, seed: u64) -> FiniteKernel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let keep = j == i || j == i + 1 || rng.random::<f64>() < 0.5;
            let x = if keep { rng.random_range(0.05..1.0) } else { 0.0 };
            w[i][j] = x;
            w[j][i] = x;
        }
    }
    let rows: Vec<Vec<f64>> = w
        .iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(|x| x / s).collect()
        })
        .collect();
    FiniteKernel::new(&rows, None).expect("normalized rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcergo_core::certify::{compatibility_check, CompatibilityMode};

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            assert_eq!(by_name(name).unwrap().name, *name);
        }
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn expdrift_certificate_is_compatible() {
        let c = bd_expdrift();
        let cert = c.certificate.unwrap();
        assert!(compatibility_check(&cert, CompatibilityMode::TwoRadius).passes);
        assert!(verify_drift(&c.kernel, &cert.v, cert.lambda, cert.b).unwrap().passes);
        assert!(!cert.c().is_full() && !cert.c_prime().is_empty());
    }

    #[test]
    fn random_chains_are_reproducible() {
        assert_eq!(random_chain(6, 0.4, 9).matrix(), random_chain(6, 0.4, 9).matrix());
    }
}
