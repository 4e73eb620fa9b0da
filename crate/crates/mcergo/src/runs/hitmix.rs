use mcergo_core::analysis::{
    default_horizon, max_hitting_time, mix_to_hit_bound, mixing_time, stationary_distribution, HitMethod,
    HitMixReport, HitStrategy, EPS_MIX,
};
use mcergo_core::montecarlo::estimate_hitting;
use mcergo_core::{tol, Error, FiniteKernel, StateSet};

use super::{derive_seed, resolve_chain, RunOutput};
use crate::config::{ExperimentConfig, Strategy};
use crate::error::{error_kind, Result};
use crate::formats::{csv_string, fmt_f64, fmt_opt};

pub const HITMIX_COLUMNS: [&str; 10] = [
    "alpha",
    "tH",
    "method",
    "worst_set",
    "worst_start",
    "tm",
    "tL",
    "mix_to_hit_bound",
    "tL_over_tH",
    "status",
];

/// Candidate sets for the Monte Carlo search: minimal coordinate windows
/// when the chain has coordinates, otherwise every feasible subset.
fn candidate_sets(k: &FiniteKernel, alpha: f64) -> mcergo_core::Result<Vec<StateSet>> {
    let n = k.n();
    let pi = stationary_distribution(k)?;
    let feasible = |s: &StateSet| s.mass(&pi) >= alpha - tol::BALANCE;
    if k.coords().is_some() {
        Ok((0..n)
            .filter_map(|lo| (lo..n).find(|&hi| feasible(&StateSet::interval(n, lo, hi))).map(|hi| StateSet::interval(n, lo, hi)))
            .collect())
    } else if n <= tol::MAX_BRUTE_STATES {
        Ok((1u64..(1u64 << n))
            .map(|bits| StateSet::from_bits(n, bits))
            .filter(|s| feasible(s))
            .collect())
    } else {
        Err(Error::TooManyStates {
            states: n,
            cap: tol::MAX_BRUTE_STATES,
        })
    }
}

fn monte_carlo_max(k: &FiniteKernel, alpha: f64, cfg: &ExperimentConfig, tag: u64) -> mcergo_core::Result<HitMixReport> {
    let sets = candidate_sets(k, alpha)?;
    if sets.is_empty() {
        return Err(Error::NoFeasibleSet { alpha });
    }
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for (si, set) in sets.iter().enumerate() {
        for x in (0..k.n()).filter(|x| !set.contains(*x)) {
            let seed = derive_seed(cfg.seed, &[tag, si as u64, x as u64]);
            let e = estimate_hitting(k, x, |y| set.contains(*y), cfg.replicas.max(1), cfg.horizon, seed)?;
            if best.is_none_or(|b| e.mean > b.0) {
                best = Some((e.mean, e.stderr, si, x));
            }
        }
    }
    let (t_h, stderr, si, start) = best.unwrap_or((0.0, 0.0, 0, 0));
    Ok(HitMixReport {
        alpha,
        t_h,
        method: HitMethod::MonteCarlo { stderr },
        worst_set: sets[si].clone(),
        worst_start: start,
        t_m: None,
        t_l: None,
        eps_mix: EPS_MIX,
    })
}

/// One row per `alpha`: `t_H(alpha)`, `t_m`, `t_L`, the `12 t_m` bound, and
/// `t_L / t_H`. Failures become status values in their row.
pub fn run_hitmix(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let chain = resolve_chain(cfg)?;
    let k = &chain.kernel;
    let full = StateSet::full(k.n());
    let horizon = default_horizon(k.n());
    let mut errors: Vec<&'static str> = Vec::new();
    let t_m = mixing_time(k, EPS_MIX, &full, false, horizon)
        .map_err(|e| errors.push(error_kind(&e)))
        .ok();
    let t_l = mixing_time(k, EPS_MIX, &full, true, horizon)
        .map_err(|e| errors.push(error_kind(&e)))
        .ok();
    errors.dedup();

    let mut failed = false;
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for (i, alpha) in cfg.alphas().into_iter().enumerate() {
        let report = match cfg.strategy {
            Strategy::Brute => max_hitting_time(k, alpha, HitStrategy::Brute),
            Strategy::Interval => max_hitting_time(k, alpha, HitStrategy::Interval),
            Strategy::MonteCarlo => monte_carlo_max(k, alpha, cfg, i as u64),
        };
        let mut status: Vec<&'static str> = errors.clone();
        let report = report.map_err(|e| status.push(error_kind(&e))).ok();
        if !status.is_empty() {
            failed = true;
        }
        let t_h = report.as_ref().map(|r| r.t_h);
        if let (Some(t_h), Some(t_m)) = (t_h, t_m) {
            if (alpha - 1.0 / 3.0).abs() < tol::BALANCE && t_h > mix_to_hit_bound(t_m) {
                status.push("mix-to-hit-violated");
                failed = true;
            }
        }
        summary.push(format!(
            "alpha {alpha:.4}: tH {} tm {} tL {} [{}]",
            fmt_opt(t_h),
            fmt_opt(t_m),
            fmt_opt(t_l),
            if status.is_empty() { "ok".to_string() } else { status.join(";") }
        ));
        rows.push(vec![
            fmt_f64(alpha),
            t_h.map_or_else(String::new, fmt_f64),
            report.as_ref().map_or_else(String::new, |r| r.method.name().to_string()),
            report.as_ref().map_or_else(String::new, |r| r.worst_set.to_string()),
            fmt_opt(report.as_ref().map(|r| r.worst_start)),
            fmt_opt(t_m),
            fmt_opt(t_l),
            t_m.map_or_else(String::new, |t| fmt_f64(mix_to_hit_bound(t))),
            match (t_l, t_h) {
                (Some(l), Some(h)) if h > 0.0 => fmt_f64(l as f64 / h),
                _ => String::new(),
            },
            if status.is_empty() { "ok".to_string() } else { status.join(";") },
        ]);
    }
    Ok(RunOutput {
        files: vec![("hitmix.csv".into(), csv_string(&HITMIX_COLUMNS, &rows))],
        summary,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ChainSpec, Experiment};

    fn cfg(name: &str, alpha: f64) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(Experiment::Hitmix);
        c.chain = Some(ChainSpec::Corpus { name: name.into() });
        c.alpha = alpha;
        c.strategy = Strategy::Brute;
        c
    }

    #[test]
    fn flip_chain_row() {
        let out = run_hitmix(&cfg("flip", 0.4)).unwrap();
        let row = out.files[0].1.lines().nth(1).unwrap().to_string();
        assert!(row.starts_with("0.4,1,brute,{0},1,"), "{row}");
    }

    #[test]
    fn identity_chain_reports_structured_error() {
        let out = run_hitmix(&cfg("identity2", 1.0 / 3.0)).unwrap();
        assert!(out.failed);
        assert!(out.files[0].1.contains("not-mixed-by-horizon"));
    }
}
