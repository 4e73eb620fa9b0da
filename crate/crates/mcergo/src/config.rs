//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use mcergo_core::kernels::{DensityKind, DensitySpec, GridStep};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Scaling,
    Certify,
    Hitmix,
    Couple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Brute,
    Interval,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictionKind {
    Mh,
    Gibbs,
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Uniform,
    ExpTilt { rate: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub shape: Shape,
    #[serde(default = "third")]
    pub unimodal_alpha: f64,
    /// Computed by quadrature when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unimodal_ratio: Option<f64>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            shape: Shape::Uniform,
            unimodal_alpha: third(),
            unimodal_ratio: None,
        }
    }
}

impl DensityConfig {
    /// Builds the density and checks the declared near-unimodality.
    pub fn build(&self) -> Result<DensitySpec> {
        let kind = match &self.shape {
            Shape::Uniform => DensityKind::Uniform,
            Shape::ExpTilt { rate } => DensityKind::ExpTilt { rate: *rate },
            Shape::PiecewiseLinear { knots } => DensityKind::PiecewiseLinear { knots: knots.clone() },
        };
        let draft = DensitySpec::new(kind.clone(), self.unimodal_alpha, 1.0).map_err(config_err)?;
        let measured = draft.central_ratio(self.unimodal_alpha, 4096).map_err(config_err)?;
        let ratio = self.unimodal_ratio.unwrap_or(measured);
        let spec = DensitySpec::new(kind, self.unimodal_alpha, ratio).map_err(config_err)?;
        if !spec.check_near_unimodal().map_err(config_err)? {
            return Err(HarnessError::config(format!(
                "density is not ({}, {ratio})-nearly unimodal: central ratio is {measured}",
                self.unimodal_alpha
            )));
        }
        Ok(spec)
    }
}

fn config_err(e: mcergo_core::Error) -> HarnessError {
    HarnessError::config(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChainSpec {
    /// A named chain from the built-in corpus.
    Corpus { name: String },
    /// Birth-death discretization of the configured density.
    BirthDeath { c: f64 },
    LazySrw { c: f64 },
    /// Two-dimensional Gibbs sampler of a positive table.
    Gibbs { rows: usize, cols: usize, probs: Vec<f64> },
    /// A kernel CSV file (coordinate header, one row per line).
    MatrixFile { path: PathBuf },
    Inline {
        rows: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coords: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VSpec {
    Table(Vec<f64>),
    /// `V(i) = exp(kappa * i)` for state index `i`.
    ExpIndex { kappa: f64 },
}

impl VSpec {
    pub fn values(&self, n: usize) -> Vec<f64> {
        match self {
            VSpec::Table(v) => v.clone(),
            VSpec::ExpIndex { kappa } => (0..n).map(|i| (kappa * i as f64).exp()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    pub v: VSpec,
    pub lambda: f64,
    pub b: f64,
    pub r: f64,
    pub r_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub density: DensityConfig,
    #[serde(default)]
    pub c_list: Vec<f64>,
    #[serde(default = "third")]
    pub alpha: f64,
    /// Extra `alpha` values for hitmix runs; `alpha` alone when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_list: Option<Vec<f64>>,
    #[serde(default)]
    pub replicas: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtable_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    /// Defaults to the corpus certificate when the chain is a corpus chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
    #[serde(default = "default_restriction")]
    pub restriction: RestrictionKind,
    /// Steps for coupling runs; the restricted mixing time when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couple_steps: Option<usize>,
    #[serde(default = "default_tv_horizon")]
    pub tv_horizon: usize,
}

fn third() -> f64 {
    1.0 / 3.0
}

fn default_horizon() -> u64 {
    1_000_000
}

fn default_strategy() -> Strategy {
    Strategy::Interval
}

fn default_restriction() -> RestrictionKind {
    RestrictionKind::Mh
}

fn default_tv_horizon() -> usize {
    500
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        serde_json::from_value(serde_json::json!({ "experiment": experiment }))
            .expect("defaults form a valid config")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(HarnessError::config("alpha must lie in (0, 0.5)"));
        }
        if let Some(list) = &self.alpha_list {
            if list.iter().any(|a| !(*a > 0.0 && *a < 0.5)) {
                return Err(HarnessError::config("alpha_list entries must lie in (0, 0.5)"));
            }
        }
        for &c in &self.c_list {
            self.grid_step(c)?;
        }
        match self.experiment {
            Experiment::Scaling if self.c_list.is_empty() => {
                return Err(HarnessError::config("scaling needs a nonempty c_list"))
            }
            Experiment::Certify | Experiment::Hitmix | Experiment::Couple if self.chain.is_none() => {
                return Err(HarnessError::config("this experiment needs a chain"))
            }
            _ => {}
        }
        if self.horizon == 0 {
            return Err(HarnessError::config("horizon must be positive"));
        }
        Ok(())
    }

    pub fn grid_step(&self, c: f64) -> Result<GridStep> {
        GridStep::from_width(c)
            .map_err(|_| HarnessError::config(format!("grid step {c} does not have an integer reciprocal")))
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.alpha_list.clone().unwrap_or_else(|| vec![self.alpha])
    }
}
