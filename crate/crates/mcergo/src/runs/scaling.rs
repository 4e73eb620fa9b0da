use mcergo_core::analysis::{default_horizon, max_hitting_time, mixing_time, HitStrategy, EPS_MIX};
use mcergo_core::kernels::{birth_death_chain, lazy_srw, BallWalk, DensitySpec, GridStep};
use mcergo_core::montecarlo::{estimate_hitting, McEstimate};
use mcergo_core::StateSet;
use rayon::prelude::*;

use super::{derive_seed, RunOutput};
use crate::config::{ExperimentConfig, Strategy};
use crate::error::Result;
use crate::formats::{csv_string, fmt_f64};
use crate::svg::{emit_svg, Series};

pub const SCALING_COLUMNS: [&str; 7] = [
    "c",
    "tH_bd_exact",
    "tH_srw_exact",
    "tH_ballwalk_mc",
    "tH_ballwalk_stderr",
    "tm_bd_exact",
    "censored_fraction",
];

const START_GRID: usize = 33;

struct Row {
    c: f64,
    th_bd: f64,
    th_srw: f64,
    mc: Option<McEstimate>,
    tm_bd: usize,
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Absent with fewer than three points.
    pub slope_stderr: Option<f64>,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Option<LogLogFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = (points.len() > 2).then(|| {
        let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    });
    Some(LogLogFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// The extreme quantile sets `[0, c floor(m(alpha)/c)]` and
/// `[c ceil(m(1-alpha)/c), 1]`, each at least one grid cell wide.
fn quantile_sets(psi: &DensitySpec, alpha: f64, c: f64) -> Result<(f64, f64)> {
    let lo = (psi.quantile(alpha)? / c).floor() * c;
    let hi = (psi.quantile(1.0 - alpha)? / c).ceil() * c;
    Ok((lo.max(c), hi.min(1.0 - c)))
}

fn ball_walk_max_hitting(cfg: &ExperimentConfig, psi: &DensitySpec, c: f64, index: usize) -> Result<McEstimate> {
    let walk = BallWalk::new(psi.clone(), c)?;
    let (lo, hi) = quantile_sets(psi, cfg.alpha, c)?;
    let targets: [(f64, f64); 2] = [(0.0, lo), (hi, 1.0)];
    let mut best: Option<McEstimate> = None;
    let mut censored: f64 = 0.0;
    for (set, &(a, b)) in targets.iter().enumerate() {
        for s in 0..START_GRID {
            let x0 = s as f64 / (START_GRID - 1) as f64;
            let seed = derive_seed(cfg.seed, &[index as u64, set as u64, s as u64]);
            let e = estimate_hitting(&walk, x0, |x| *x >= a && *x <= b, cfg.replicas, cfg.horizon, seed)?;
            censored = censored.max(e.censored_fraction);
            if best.is_none_or(|b| e.mean > b.mean) {
                best = Some(e);
            }
        }
    }
    let mut best = best.expect("start grid is nonempty");
    best.censored_fraction = censored;
    Ok(best)
}

fn scaling_row(cfg: &ExperimentConfig, psi: &DensitySpec, c: f64, index: usize) -> Result<Row> {
    let step: GridStep = cfg.grid_step(c)?;
    let h = birth_death_chain(psi, step)?;
    let w = lazy_srw(step);
    let strategy = match cfg.strategy {
        Strategy::Brute if h.n() <= mcergo_core::tol::MAX_BRUTE_STATES => HitStrategy::Brute,
        _ => HitStrategy::Interval,
    };
    let th_bd = max_hitting_time(&h, cfg.alpha, strategy)?.t_h;
    let th_srw = max_hitting_time(&w, cfg.alpha, strategy)?.t_h;
    let tm_bd = mixing_time(&h, EPS_MIX, &StateSet::full(h.n()), false, default_horizon(h.n()))?;
    let mc = if cfg.replicas > 0 {
        Some(ball_walk_max_hitting(cfg, psi, c, index)?)
    } else {
        None
    };
    Ok(Row {
        c,
        th_bd,
        th_srw,
        mc,
        tm_bd,
    })
}

/// Exact `t_H(h_c, alpha)`, `t_H(w_c, alpha)`, `t_m(h_c)` and (with
/// replicas) a Monte Carlo `t_H` for the ball walk, one row per `c`, plus
/// log-log slope fits and a chart.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let psi = cfg.density.build()?;
    let rows: Vec<Row> = cfg
        .c_list
        .par_iter()
        .enumerate()
        .map(|(i, &c)| scaling_row(cfg, &psi, c, i))
        .collect::<Result<_>>()?;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.c),
                fmt_f64(r.th_bd),
                fmt_f64(r.th_srw),
                r.mc.map_or_else(String::new, |m| fmt_f64(m.mean)),
                r.mc.map_or_else(String::new, |m| fmt_f64(m.stderr)),
                r.tm_bd.to_string(),
                r.mc.map_or_else(String::new, |m| fmt_f64(m.censored_fraction)),
            ]
        })
        .collect();

    let mut series = vec![
        Series {
            label: "tH_bd_exact".into(),
            points: rows.iter().map(|r| (r.c, r.th_bd)).collect(),
        },
        Series {
            label: "tH_srw_exact".into(),
            points: rows.iter().map(|r| (r.c, r.th_srw)).collect(),
        },
        Series {
            label: "tm_bd_exact".into(),
            points: rows.iter().map(|r| (r.c, r.tm_bd as f64)).collect(),
        },
    ];
    if rows.iter().all(|r| r.mc.is_some()) && !rows.is_empty() {
        series.push(Series {
            label: "tH_ballwalk_mc".into(),
            points: rows.iter().map(|r| (r.c, r.mc.expect("checked").mean)).collect(),
        });
    }

    let mut summary = Vec::new();
    let fits: Vec<Vec<String>> = series
        .iter()
        .map(|s| {
            let fit = fit_loglog(&s.points);
            if let Some(f) = fit {
                summary.push(format!("{}: log-log slope {:.4}", s.label, f.slope));
            }
            vec![
                s.label.clone(),
                fit.map_or_else(String::new, |f| fmt_f64(f.slope)),
                fit.and_then(|f| f.slope_stderr).map_or_else(String::new, fmt_f64),
                fit.map_or_else(String::new, |f| fmt_f64(f.intercept)),
                s.points.len().to_string(),
            ]
        })
        .collect();

    let svg = emit_svg("Hitting and mixing times against grid step", "c", "steps", &series)?;
    Ok(RunOutput {
        files: vec![
            ("scaling.csv".into(), csv_string(&SCALING_COLUMNS, &table)),
            (
                "scaling_fit.csv".into(),
                csv_string(&["series", "slope", "slope_stderr", "intercept", "points"], &fits),
            ),
            ("scaling.svg".into(), svg),
        ],
        summary,
        failed: false,
    })
}
