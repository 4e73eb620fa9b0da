//! The four experiments. Each run computes its files in memory so that
//! output bytes depend only on the configuration.

mod certify;
mod couple;
mod hitmix;
mod scaling;

use std::fs;
use std::path::Path;

use mcergo_core::kernels::{
    birth_death_chain, gibbs_grid_kernel, lazy_srw, DominatedKernel, GibbsTable, Restriction,
};
use mcergo_core::certify::DriftCertificate;

pub use certify::{dominance_profile, run_certify, DominanceRow, DOMINANCE_TOL, MAX_PROFILE_STATES};
pub use couple::{run_couple, COUPLE_COLUMNS};
pub use hitmix::{run_hitmix, HITMIX_COLUMNS};
pub use scaling::{fit_loglog, run_scaling, LogLogFit, SCALING_COLUMNS};

use crate::config::{ChainSpec, Experiment, ExperimentConfig, RestrictionKind};
use crate::corpus::{self, CorpusChain};
use crate::error::{HarnessError, Result};
use crate::formats::load_kernel;
use crate::manifest::Manifest;

/// Files produced by a run plus a short human summary.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
    /// Set when the run finished but recorded an analysis failure.
    pub failed: bool,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Scaling => run_scaling(cfg),
        Experiment::Certify => run_certify(cfg),
        Experiment::Hitmix => run_hitmix(cfg),
        Experiment::Couple => run_couple(cfg),
    }
}

/// Runs the experiment and writes its files and manifest into `out`.
pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutput> {
    let output = run(cfg)?;
    fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    for (name, body) in &output.files {
        crate::formats::write_file(&out.join(name), body)?;
    }
    Manifest::new(cfg, &output.files).write(out)?;
    Ok(output)
}

/// Resolves the configured chain; an explicit certificate overrides the
/// corpus one.
pub fn resolve_chain(cfg: &ExperimentConfig) -> Result<CorpusChain> {
    let spec = cfg
        .chain
        .as_ref()
        .ok_or_else(|| HarnessError::config("no chain configured"))?;
    let plain = |name: &str, kernel| CorpusChain {
        name: name.to_string(),
        kernel,
        certificate: None,
        table: None,
    };
    let mut chain = match spec {
        ChainSpec::Corpus { name } => corpus::by_name(name)?,
        ChainSpec::BirthDeath { c } => {
            let psi = cfg.density.build()?;
            plain("birth-death", birth_death_chain(&psi, cfg.grid_step(*c)?)?)
        }
        ChainSpec::LazySrw { c } => plain("lazy-srw", lazy_srw(cfg.grid_step(*c)?)),
        ChainSpec::Gibbs { rows, cols, probs } => {
            let table = GibbsTable::new(*rows, *cols, probs).map_err(|e| HarnessError::config(e.to_string()))?;
            CorpusChain {
                name: "gibbs".into(),
                kernel: gibbs_grid_kernel(&table),
                certificate: None,
                table: Some(table),
            }
        }
        ChainSpec::MatrixFile { path } => plain("matrix-file", load_kernel(path)?),
        ChainSpec::Inline { rows, coords } => plain(
            "inline",
            mcergo_core::FiniteKernel::new(rows, coords.clone()).map_err(|e| HarnessError::config(e.to_string()))?,
        ),
    };
    if let Some(c) = &cfg.certificate {
        let v = c.v.values(chain.kernel.n());
        if v.len() != chain.kernel.n() {
            return Err(HarnessError::config(format!(
                "V has {} entries for a chain with {} states",
                v.len(),
                chain.kernel.n()
            )));
        }
        chain.certificate =
            Some(DriftCertificate::new(v, c.lambda, c.b, c.r, c.r_prime).map_err(|e| HarnessError::config(e.to_string()))?);
    }
    Ok(chain)
}

pub(crate) fn restriction<'t>(kind: RestrictionKind, chain: &'t CorpusChain) -> Result<Restriction<'t>> {
    Ok(match kind {
        RestrictionKind::Mh => Restriction::Mh,
        RestrictionKind::Trace => Restriction::Trace,
        RestrictionKind::Gibbs => Restriction::Gibbs(
            chain
                .table
                .as_ref()
                .ok_or_else(|| HarnessError::config("gibbs restriction needs a gibbs chain"))?,
        ),
    })
}

pub(crate) fn certificate(chain: &CorpusChain) -> Result<&DriftCertificate> {
    chain
        .certificate
        .as_ref()
        .ok_or_else(|| HarnessError::config("this experiment needs a drift certificate"))
}

/// Mixes a run seed with integer tags (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut z = seed;
    for &t in tags {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(t.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

pub(crate) fn local_starts(d: &DominatedKernel<'_>, set: &mcergo_core::StateSet) -> mcergo_core::StateSet {
    mcergo_core::StateSet::from_predicate(d.kernel().n(), |a| set.contains(d.states()[a]))
}
