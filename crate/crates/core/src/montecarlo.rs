//! Seeded trajectory simulation.
//!
//! Every replica draws from its own ChaCha stream: the base seed fixes the
//! key and the replica index selects the stream, so results do not depend on
//! how replicas are scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernels::{BallWalk, DominatedKernel, FiniteKernel};
use crate::{tol, Error, Result};

/// A chain that can be stepped with an explicit random source.
pub trait Sampler {
    type State: Clone + PartialEq;

    fn step<R: Rng + ?Sized>(&self, x: &Self::State, rng: &mut R) -> Self::State;
}

impl Sampler for FiniteKernel {
    type State = usize;

    fn step<R: Rng + ?Sized>(&self, x: &usize, rng: &mut R) -> usize {
        self.next_state(*x, rng.random::<f64>())
    }
}

impl Sampler for BallWalk {
    type State = f64;

    fn step<R: Rng + ?Sized>(&self, x: &f64, rng: &mut R) -> f64 {
        let u_propose = rng.random::<f64>();
        let u_accept = rng.random::<f64>();
        BallWalk::step(self, *x, u_propose, u_accept)
    }
}

/// Random stream for `replica` under `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// `X_0 = x0, X_1, ..., X_T` from stream 0 of `seed`.
pub fn sample_path<S: Sampler>(sampler: &S, x0: S::State, steps: usize, seed: u64) -> Vec<S::State> {
    let mut rng = replica_rng(seed, 0);
    let mut path = Vec::with_capacity(steps + 1);
    path.push(x0);
    for t in 0..steps {
        let next = sampler.step(&path[t], &mut rng);
        path.push(next);
    }
    path
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(replicas)`.
    pub stderr: f64,
    pub replicas: u64,
    pub seed: u64,
    pub horizon: u64,
    /// Fraction of replicas that never hit within the horizon; they enter
    /// the mean at the horizon value.
    pub censored_fraction: f64,
}

impl McEstimate {
    fn from_samples(samples: &[f64], censored: u64, seed: u64, horizon: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: libm::sqrt(var / n),
            replicas: samples.len() as u64,
            seed,
            horizon,
            censored_fraction: censored as f64 / n,
        }
    }
}

fn hit_time<S: Sampler>(
    sampler: &S,
    x0: &S::State,
    target: &impl Fn(&S::State) -> bool,
    horizon: u64,
    seed: u64,
    replica: u64,
) -> (u64, bool) {
    let mut rng = replica_rng(seed, replica);
    let mut x = x0.clone();
    for t in 0..horizon {
        if target(&x) {
            return (t, false);
        }
        x = sampler.step(&x, &mut rng);
    }
    if target(&x) {
        (horizon, false)
    } else {
        (horizon, true)
    }
}

fn run_replicas<T: Send>(replicas: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..replicas).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..replicas).map(f).collect()
    }
}

/// Estimates `E_{x0}[tau(A)]` where `A = {x : target(x)}`.
///
/// Replicas that have not hit by `horizon` contribute `horizon` and are
/// counted in `censored_fraction`.
pub fn estimate_hitting<S>(
    sampler: &S,
    x0: S::State,
    target: impl Fn(&S::State) -> bool + Sync,
    replicas: u64,
    horizon: u64,
    seed: u64,
) -> Result<McEstimate>
where
    S: Sampler + Sync,
    S::State: Sync,
{
    if replicas == 0 {
        return Err(Error::InvalidParameters("at least one replica is required"));
    }
    let runs = run_replicas(replicas, |r| hit_time(sampler, &x0, &target, horizon, seed, r));
    let censored = runs.iter().filter(|r| r.1).count() as u64;
    if censored == replicas {
        return Err(Error::AllCensored { horizon });
    }
    let samples: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
    Ok(McEstimate::from_samples(&samples, censored, seed, horizon))
}

/// The base chain `X` and its restriction `Y` run under the maximal
/// coupling while they agree, independently afterwards.
struct Coupling<'k, 'a> {
    base: &'k FiniteKernel,
    restricted: &'k DominatedKernel<'a>,
    /// Per state of `S`: cumulative `min(P(z, .), P_S(z, .))` over base
    /// indices, or empty outside `S`.
    overlap: Vec<Vec<(usize, f64)>>,
}

impl<'k, 'a> Coupling<'k, 'a> {
    fn new(base: &'k FiniteKernel, restricted: &'k DominatedKernel<'a>) -> Self {
        let overlap = (0..base.n())
            .map(|z| {
                if restricted.local_index(z).is_none() {
                    return Vec::new();
                }
                base.sparse_row(z)
                    .iter()
                    .filter_map(|&(w, p)| {
                        let m = p.min(restricted.prob(z, w));
                        (m > 0.0).then_some((w, m))
                    })
                    .collect()
            })
            .collect();
        Self {
            base,
            restricted,
            overlap,
        }
    }

    fn restricted_step<R: Rng + ?Sized>(&self, y: usize, rng: &mut R) -> usize {
        let local = self.restricted.local_index(y).expect("restricted chain stays in S");
        let next = self.restricted.kernel().next_state(local, rng.random::<f64>());
        self.restricted.states()[next]
    }

    /// One coupled transition from `(x, y)`.
    fn step<R: Rng + ?Sized>(&self, x: usize, y: usize, rng: &mut R) -> (usize, usize) {
        if x != y {
            let nx = self.base.next_state(x, rng.random::<f64>());
            let ny = self.restricted_step(y, rng);
            return (nx, ny);
        }
        let z = x;
        let shared: f64 = self.overlap[z].iter().map(|e| e.1).sum();
        let u = rng.random::<f64>() * 1.0;
        if u < shared {
            let mut acc = 0.0;
            for &(w, m) in &self.overlap[z] {
                acc += m;
                if u < acc {
                    return (w, w);
                }
            }
            let w = self.overlap[z].last().expect("positive overlap").0;
            return (w, w);
        }
        // Residuals of the maximal coupling have disjoint supports.
        let nx = sample_residual(self.base.sparse_row(z), |w| self.overlap_at(z, w), rng);
        let local = self.restricted.local_index(z).expect("coupled state lies in S");
        let row: Vec<(usize, f64)> = self
            .restricted
            .kernel()
            .sparse_row(local)
            .iter()
            .map(|&(b, p)| (self.restricted.states()[b], p))
            .collect();
        let ny = sample_residual(&row, |w| self.overlap_at(z, w), rng);
        (nx, ny)
    }

    fn overlap_at(&self, z: usize, w: usize) -> f64 {
        self.overlap[z]
            .iter()
            .find(|e| e.0 == w)
            .map_or(0.0, |e| e.1)
    }
}

fn sample_residual<R: Rng + ?Sized>(row: &[(usize, f64)], overlap: impl Fn(usize) -> f64, rng: &mut R) -> usize {
    let residual: Vec<(usize, f64)> = row
        .iter()
        .map(|&(w, p)| (w, (p - overlap(w)).max(0.0)))
        .filter(|e| e.1 > 0.0)
        .collect();
    let total: f64 = residual.iter().map(|e| e.1).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for &(w, r) in &residual {
        acc += r;
        if u < acc {
            return w;
        }
    }
    residual.last().map_or(row[0].0, |e| e.0)
}

fn check_coupling_inputs(g: &FiniteKernel, restricted: &DominatedKernel<'_>, x0: usize) -> Result<()> {
    if restricted.base().matrix() != g.matrix() {
        return Err(Error::GridMismatch);
    }
    restricted.check_domination(tol::BALANCE)?;
    if restricted.local_index(x0).is_none() {
        return Err(Error::InvalidParameters("coupled start must lie in the restriction set"));
    }
    Ok(())
}

/// One coupled pair of paths of length `steps + 1`, for inspection.
pub fn coupled_paths(
    g: &FiniteKernel,
    restricted: &DominatedKernel<'_>,
    x0: usize,
    steps: usize,
    seed: u64,
    replica: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    check_coupling_inputs(g, restricted, x0)?;
    let coupling = Coupling::new(g, restricted);
    let mut rng = replica_rng(seed, replica);
    let (mut xs, mut ys) = (alloc::vec![x0], alloc::vec![x0]);
    for t in 0..steps {
        let (x, y) = coupling.step(xs[t], ys[t], &mut rng);
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}

/// Estimates `P[X_T != Y_T]` where `X ~ g` and `Y ~ g^(C)` start at `x0`
/// and move together (maximal coupling) while both sit at the same state,
/// evolving independently once they separate. Under domination they
/// separate exactly when `X` leaves `C`.
pub fn coupled_escape_estimate(
    g: &FiniteKernel,
    restricted: &DominatedKernel<'_>,
    x0: usize,
    steps: usize,
    replicas: u64,
    seed: u64,
) -> Result<McEstimate> {
    if replicas == 0 {
        return Err(Error::InvalidParameters("at least one replica is required"));
    }
    check_coupling_inputs(g, restricted, x0)?;
    let coupling = Coupling::new(g, restricted);
    let apart = run_replicas(replicas, |r| {
        let mut rng = replica_rng(seed, r);
        let (mut x, mut y) = (x0, x0);
        for _ in 0..steps {
            (x, y) = coupling.step(x, y, &mut rng);
        }
        if x != y {
            1.0
        } else {
            0.0
        }
    });
    Ok(McEstimate::from_samples(&apart, 0, seed, steps as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{restrict, DensitySpec, Restriction, StateSet};
    use alloc::vec;

    #[test]
    fn zero_steps_path() {
        let k = FiniteKernel::identity(3);
        assert_eq!(sample_path(&k, 2, 0, 7), vec![2]);
        assert_eq!(sample_path(&k, 1, 5, 7), vec![1; 6]);
    }

    #[test]
    fn paths_reproduce_bit_for_bit() {
        let w = BallWalk::new(DensitySpec::uniform(), 0.1).unwrap();
        let a = sample_path(&w, 0.3, 200, 42);
        let b = sample_path(&w, 0.3, 200, 42);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_ne!(a, sample_path(&w, 0.3, 200, 43));
    }

    #[test]
    fn start_in_target_hits_at_zero() {
        let k = FiniteKernel::identity(2);
        let e = estimate_hitting(&k, 0, |x| *x == 0, 10, 5, 1).unwrap();
        assert_eq!((e.mean, e.stderr, e.censored_fraction), (0.0, 0.0, 0.0));
    }

    #[test]
    fn never_hitting_is_all_censored() {
        let k = FiniteKernel::identity(2);
        assert_eq!(
            estimate_hitting(&k, 0, |x| *x == 1, 10, 5, 1).unwrap_err(),
            Error::AllCensored { horizon: 5 }
        );
    }

    #[test]
    fn full_restriction_never_decouples() {
        let k = FiniteKernel::new(&[vec![0.5, 0.5, 0.0], vec![0.25, 0.5, 0.25], vec![0.0, 0.5, 0.5]], None).unwrap();
        let d = restrict(&k, &StateSet::full(3), Restriction::Mh).unwrap();
        let e = coupled_escape_estimate(&k, &d, 0, 50, 500, 3).unwrap();
        assert_eq!(e.mean, 0.0);
        let e = coupled_escape_estimate(&k, &d, 0, 0, 10, 3).unwrap();
        assert_eq!(e.mean, 0.0);
    }
}
