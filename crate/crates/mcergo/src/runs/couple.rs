use mcergo_core::analysis::{default_horizon, mixing_time, EPS_MIX};
use mcergo_core::certify::escape_bound;
use mcergo_core::kernels::restrict;
use mcergo_core::montecarlo::coupled_escape_estimate;

use super::{certificate, derive_seed, local_starts, resolve_chain, restriction, RunOutput};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::formats::{csv_string, fmt_f64};

pub const COUPLE_COLUMNS: [&str; 6] = ["quantity", "mean", "stderr", "replicas", "censored_fraction", "seed"];

/// Runs the chain and its restriction to `C` under the coupling from each
/// start in `C'` and compares the decoupling frequency after `T` steps
/// with `2r'/(r(1 - lambda) - b)`.
pub fn run_couple(cfg: &ExperimentConfig) -> Result<RunOutput> {
    if cfg.replicas == 0 {
        return Err(HarnessError::config("couple needs replicas > 0"));
    }
    let chain = resolve_chain(cfg)?;
    let cert = certificate(&chain)?;
    let how = restriction(cfg.restriction, &chain)?;
    let k = &chain.kernel;
    let (c, c_prime) = (cert.c(), cert.c_prime());
    let d = restrict(k, &c, how)?;
    let steps = match cfg.couple_steps {
        Some(s) => s,
        None => {
            let starts = local_starts(&d, &c_prime);
            mixing_time(d.kernel(), EPS_MIX, &starts, false, default_horizon(d.kernel().n()))?
        }
    };
    let bound = escape_bound(cert.lambda, cert.b, cert.r, cert.r_prime)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut failed = false;
    for x in c_prime.indices() {
        let seed = derive_seed(cfg.seed, &[x as u64]);
        let e = coupled_escape_estimate(k, &d, x, steps, cfg.replicas, seed)?;
        let ok = e.mean <= bound + 3.0 * e.stderr;
        failed |= !ok;
        summary.push(format!(
            "start {x}: decoupled {:.5} +/- {:.5} after {steps} steps, bound {:.5} [{}]",
            e.mean,
            e.stderr,
            bound,
            if ok { "ok" } else { "exceeds" }
        ));
        rows.push(vec![
            format!("decoupling_frequency[x={x}]"),
            fmt_f64(e.mean),
            fmt_f64(e.stderr),
            e.replicas.to_string(),
            fmt_f64(e.censored_fraction),
            e.seed.to_string(),
        ]);
    }
    rows.push(vec![
        "escape_bound".into(),
        fmt_f64(bound),
        "0".into(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    rows.push(vec![
        "steps".into(),
        steps.to_string(),
        "0".into(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    Ok(RunOutput {
        files: vec![("couple.csv".into(), csv_string(&COUPLE_COLUMNS, &rows))],
        summary,
        failed,
    })
}
