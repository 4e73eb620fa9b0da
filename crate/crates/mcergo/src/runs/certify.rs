use mcergo_core::analysis::{stationary_distribution, tv_distance};
use mcergo_core::certify::{
    certify_drift_and_hit, compatibility_check, CertificationReport, CertifyOptions, CompatibilityMode,
    CompatibilityReport, DriftCertificate,
};
use mcergo_core::FiniteKernel;
use serde_json::{json, Value};

use super::{certificate, resolve_chain, restriction, RunOutput};
use crate::config::ExperimentConfig;
use crate::error::{error_kind, Result};
use crate::formats::{csv_string, fmt_f64, load_dtable};

/// Slack allowed when comparing exact TV against the assembled bound.
pub const DOMINANCE_TOL: f64 = 1e-9;

/// Largest chain whose exact TV profile is computed.
pub const MAX_PROFILE_STATES: usize = 512;

/// Per-`t` summary of `bound(x, t) - TV(P^t(x, .), pi)` over all states.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceRow {
    pub t: usize,
    pub max_tv: f64,
    pub min_margin: f64,
    pub worst_state: usize,
}

/// Exact TV against the bound for `t = 0..=t_max`.
pub fn dominance_profile(
    k: &FiniteKernel,
    cert: &DriftCertificate,
    report: &CertificationReport,
    t_max: usize,
) -> mcergo_core::Result<Vec<DominanceRow>> {
    let pi = stationary_distribution(k)?;
    let n = k.n();
    let mut dists: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut mu = vec![0.0; n];
            mu[x] = 1.0;
            mu
        })
        .collect();
    let mut rows = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut row = DominanceRow {
            t,
            max_tv: 0.0,
            min_margin: f64::INFINITY,
            worst_state: 0,
        };
        for (x, mu) in dists.iter().enumerate() {
            let tv = tv_distance(mu, &pi)?;
            let margin = report.bound.eval(cert.v[x], t as u64) - tv;
            row.max_tv = row.max_tv.max(tv);
            if margin < row.min_margin {
                row.min_margin = margin;
                row.worst_state = x;
            }
        }
        rows.push(row);
        for mu in dists.iter_mut() {
            *mu = k.push_forward(mu);
        }
    }
    Ok(rows)
}

fn compat_json(c: &CompatibilityReport) -> Value {
    json!({
        "passes": c.passes,
        "r_threshold": c.r_threshold,
        "r_margin": c.r_margin,
        "r_prime_threshold": c.r_prime_threshold,
        "r_prime_margin": c.r_prime_margin,
        "violation": c.violation(),
    })
}

fn report_json(name: &str, cert: &DriftCertificate, rep: &CertificationReport) -> Value {
    let m: Vec<f64> = cert.v.iter().map(|v| rep.bound.m(*v)).collect();
    let (t_h, d_alpha, d_verified) = match rep.step_source {
        mcergo_core::certify::StepSource::HitTable { t_h, d_alpha, verified } => (Some(t_h), Some(d_alpha), Some(verified)),
        mcergo_core::certify::StepSource::ExactMixing => (None, None, None),
    };
    json!({
        "chain": name,
        "states": cert.v.len(),
        "certificate": {
            "lambda": cert.lambda, "b": cert.b, "r": cert.r, "r_prime": cert.r_prime,
        },
        "compatibility": compat_json(&rep.compatibility),
        "drift_slack": rep.drift.slack,
        "drift_worst_state": rep.drift.worst_state,
        "restriction": rep.variant.name(),
        "restricted_drift_slack": rep.restricted_drift.slack,
        "c": rep.c.to_string(),
        "c_prime": rep.c_prime.to_string(),
        "degenerate_restriction": rep.c.is_full(),
        "t_mix": rep.t_mix,
        "t_source": rep.step_source.name(),
        "t_h_restricted": t_h,
        "d_alpha": d_alpha,
        "d_alpha_verified": d_verified,
        "steps_per_block": rep.bound.steps,
        "epsilon": rep.bound.epsilon,
        "epsilon_exact": rep.epsilon_exact,
        "epsilon_theory": rep.epsilon_theory,
        "epsilon_source": rep.epsilon_source.name(),
        "lambda_block": rep.lambda_steps,
        "b_block": rep.b_steps,
        "p": rep.contraction.p,
        "rho": rep.contraction.rho,
        "a": rep.contraction.a,
        "b_coef": rep.contraction.b_coef,
        "bisection_gap": rep.contraction.bisection_gap,
        "escape_bound": rep.escape_bound,
        "m_offset": rep.bound.m_offset,
        "m": m,
        "source": rep.bound.source.name(),
        "convention": "TV(g(x,t,.), pi) <= M(x) (1 - rho)^floor(t / steps_per_block); the contraction is solved for the steps_per_block-step kernel with radius r_prime",
    })
}

/// Runs the certification pipeline and, for small chains, checks the
/// assembled bound against exact total variation for `t <= tv_horizon`.
pub fn run_certify(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let chain = resolve_chain(cfg)?;
    let cert = certificate(&chain)?;
    let how = restriction(cfg.restriction, &chain)?;
    let table = cfg.dtable_path.as_deref().map(load_dtable).transpose()?;
    let options = CertifyOptions {
        alpha: cfg.alpha,
        dtable: table.as_ref(),
        ..CertifyOptions::default()
    };
    let k = &chain.kernel;
    let result = certify_drift_and_hit(k, cert, how, &options);
    let rep = match result {
        Ok(r) => r,
        Err(e) => {
            let failure = json!({
                "chain": chain.name,
                "verdict": "FAIL",
                "error": error_kind(&e),
                "message": e.to_string(),
                "compatibility": compat_json(&compatibility_check(cert, CompatibilityMode::TwoRadius)),
            });
            return Ok(RunOutput {
                files: vec![("certify_report.json".into(), pretty(&failure))],
                summary: vec![format!("FAIL: {e}")],
                failed: true,
            });
        }
    };

    let mut report = report_json(&chain.name, cert, &rep);
    let mut files = Vec::new();
    let mut summary = vec![format!(
        "T = {}, eps = {:.6} ({}), p = {:.6}, rho = {:.6e}",
        rep.t_mix,
        rep.bound.epsilon,
        rep.epsilon_source.name(),
        rep.bound.p,
        rep.bound.rho
    )];
    let mut failed = false;
    if k.n() <= MAX_PROFILE_STATES {
        let profile = dominance_profile(k, cert, &rep, cfg.tv_horizon)?;
        let worst = profile
            .iter()
            .min_by(|a, b| a.min_margin.total_cmp(&b.min_margin))
            .expect("profile has t = 0");
        let pass = worst.min_margin >= -DOMINANCE_TOL;
        failed = !pass;
        report["tv_horizon"] = json!(cfg.tv_horizon);
        report["min_margin"] = json!(worst.min_margin);
        report["min_margin_t"] = json!(worst.t);
        report["min_margin_state"] = json!(worst.worst_state);
        report["verdict"] = json!(if pass { "PASS" } else { "FAIL" });
        summary.push(format!(
            "exact TV dominance for t <= {}: {} (min margin {:.3e} at t = {})",
            cfg.tv_horizon,
            if pass { "PASS" } else { "FAIL" },
            worst.min_margin,
            worst.t
        ));
        let rows: Vec<Vec<String>> = profile
            .iter()
            .map(|r| {
                vec![
                    r.t.to_string(),
                    fmt_f64(r.max_tv),
                    fmt_f64(r.min_margin),
                    r.worst_state.to_string(),
                ]
            })
            .collect();
        files.push((
            "certify_tv.csv".into(),
            csv_string(&["t", "max_tv", "min_margin", "worst_state"], &rows),
        ));
    } else {
        report["verdict"] = json!("UNCHECKED");
    }
    files.insert(0, ("certify_report.json".into(), pretty(&report)));
    Ok(RunOutput {
        files,
        summary,
        failed,
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}
