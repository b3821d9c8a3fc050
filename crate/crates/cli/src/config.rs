//! JSON run settings and command-line overrides.

use std::path::{Path, PathBuf};

use bssn_core::experiments::{DeblurConfig, DiscrepancyConfig, REFERENCE_SUPPORT_WEIGHTS};
use bssn_core::newton::{SolverConfig, Variant};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Flags that take precedence over the configuration file.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Overrides {
    /// Threshold scaling gamma
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Uniform regularization weight
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    /// Stopping tolerance on ||F(u)||_2
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Armijo sufficient-decrease constant
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Armijo backtracking factor
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Hybrid switch threshold on the iteration count ("inf" to never switch)
    #[arg(long, value_parser = parse_jmax)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jmax: Option<usize>,
    /// Hybrid switch threshold on the step length
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmin: Option<f64>,
    /// Seed for synthesized data
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// bssn, modbssn or hybrid
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
}

fn parse_jmax(s: &str) -> Result<usize, String> {
    match s {
        "inf" | "infinity" => Ok(usize::MAX),
        _ => s.parse().map_err(|e| format!("{e}")),
    }
}

impl Overrides {
    pub fn apply_solver(&self, cfg: &mut SolverConfig) {
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.sigma {
            cfg.armijo_sigma = v;
        }
        if let Some(v) = self.beta {
            cfg.armijo_beta = v;
        }
        if let Some(v) = self.jmax {
            cfg.j_max = v;
        }
        if let Some(v) = self.tmin {
            cfg.t_min = v;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
    }

    fn touches_solver(&self) -> bool {
        self.gamma.is_some()
            || self.tol.is_some()
            || self.sigma.is_some()
            || self.beta.is_some()
            || self.jmax.is_some()
            || self.tmin.is_some()
            || self.variant.is_some()
    }
}

/// Resolves relative paths in a settings file against the config file's
/// directory.
fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn check_solver(cfg: &SolverConfig) -> Result<(), CliError> {
    cfg.validate().map_err(CliError::config)
}

fn check_weight(w: f64) -> Result<(), CliError> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "weight must be positive, got {w}"
        )))
    }
}

pub fn load<T: DeserializeOwned>(path: Option<&Path>, required: bool) -> Result<T, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None if required => return Err(CliError::Config("this command needs --config".into())),
        None => "{}".into(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeblurSettings {
    pub image: DeblurConfig,
    pub solver: SolverConfig,
    /// Fixed weight; the discrepancy principle chooses one when absent.
    pub w: Option<f64>,
    pub discrepancy: DiscrepancyConfig,
}

impl Default for DeblurSettings {
    fn default() -> Self {
        Self {
            image: DeblurConfig::default(),
            solver: SolverConfig {
                gamma: 1e5,
                ..SolverConfig::default()
            },
            w: None,
            discrepancy: DiscrepancyConfig::default(),
        }
    }
}

impl DeblurSettings {
    pub fn finish(mut self, o: &Overrides) -> Result<Self, CliError> {
        o.apply_solver(&mut self.solver);
        if let Some(w) = o.w {
            self.w = Some(w);
        }
        if let Some(seed) = o.seed {
            self.image.seed = seed;
        }
        check_solver(&self.solver)?;
        self.discrepancy.validate().map_err(CliError::config)?;
        if let Some(w) = self.w {
            check_weight(w)?;
        }
        if self.image.noise_level.is_nan() || self.image.noise_level < 0.0 {
            return Err(CliError::Config(format!(
                "noise level must be nonnegative, got {}",
                self.image.noise_level
            )));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressSettings {
    pub m: usize,
    pub n: usize,
    pub support_weights: Vec<f64>,
    pub outlier_fraction: f64,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Single weight; overrides `weights` when present.
    pub w: Option<f64>,
    /// Strictly increasing weight grid for a warm-started path.
    pub weights: Vec<f64>,
}

impl Default for RegressSettings {
    fn default() -> Self {
        Self {
            m: 2000,
            n: 50,
            support_weights: REFERENCE_SUPPORT_WEIGHTS.to_vec(),
            outlier_fraction: 0.1,
            seed: 0,
            solver: SolverConfig {
                gamma: 10.0,
                ..SolverConfig::default()
            },
            w: None,
            weights: (1..=60).map(|i| 0.005 * i as f64).collect(),
        }
    }
}

impl RegressSettings {
    pub fn finish(mut self, o: &Overrides) -> Result<Self, CliError> {
        o.apply_solver(&mut self.solver);
        if let Some(w) = o.w {
            self.w = Some(w);
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        check_solver(&self.solver)?;
        if self.support_weights.len() > self.n {
            return Err(CliError::Config(format!(
                "{} support weights for n = {}",
                self.support_weights.len(),
                self.n
            )));
        }
        if self.m <= self.n + 1 {
            return Err(CliError::Config(format!(
                "need m > n + 1, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        match self.w {
            Some(w) => check_weight(w)?,
            None => check_grid(&self.weights)?,
        }
        Ok(self)
    }
}

fn check_grid(weights: &[f64]) -> Result<(), CliError> {
    if weights.is_empty() {
        return Err(CliError::Config("weight grid is empty".into()));
    }
    for &w in weights {
        check_weight(w)?;
    }
    if weights.windows(2).any(|p| p[1] <= p[0]) {
        return Err(CliError::Config(
            "weight grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Problem data read from CSV files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSource {
    /// `1/2 ||K u - f||^2 + ridge/2 ||u||^2`
    Quadratic {
        matrix: PathBuf,
        data: PathBuf,
        #[serde(default)]
        ridge: f64,
    },
    /// Robust L1-L2 regression loss.
    Robust {
        design: PathBuf,
        response: PathBuf,
        #[serde(default = "unit")]
        rho: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl ProblemSource {
    fn resolve(&mut self, base: &Path) {
        match self {
            Self::Quadratic { matrix, data, .. } => {
                resolve(base, matrix);
                resolve(base, data);
            }
            Self::Robust {
                design, response, ..
            } => {
                resolve(base, design);
                resolve(base, response);
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSettings {
    pub problem: ProblemSource,
    /// Uniform weight, used unless `weights_file` is given.
    #[serde(default)]
    pub w: Option<f64>,
    /// One weight per coordinate, as a CSV column.
    #[serde(default)]
    pub weights_file: Option<PathBuf>,
    /// Start vector as a CSV column; zero when absent.
    #[serde(default)]
    pub start: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl SolveSettings {
    pub fn finish(mut self, base: &Path, o: &Overrides) -> Result<Self, CliError> {
        o.apply_solver(&mut self.solver);
        if o.seed.is_some() {
            return Err(CliError::Config("--seed does not apply to solve".into()));
        }
        if let Some(w) = o.w {
            self.w = Some(w);
            self.weights_file = None;
        }
        check_solver(&self.solver)?;
        self.problem.resolve(base);
        if let Some(p) = self.weights_file.as_mut() {
            resolve(base, p);
        }
        if let Some(p) = self.start.as_mut() {
            resolve(base, p);
        }
        match (self.w, &self.weights_file) {
            (Some(w), None) => check_weight(w)?,
            (None, Some(_)) => {}
            _ => {
                return Err(CliError::Config(
                    "give exactly one of w and weights_file".into(),
                ))
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSettings {
    pub problem: ProblemSource,
    /// Strictly increasing weight grid.
    pub weights: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl PathSettings {
    pub fn finish(mut self, base: &Path, o: &Overrides) -> Result<Self, CliError> {
        if o.w.is_some() || o.seed.is_some() {
            return Err(CliError::Config(
                "--w and --seed do not apply to path".into(),
            ));
        }
        o.apply_solver(&mut self.solver);
        check_solver(&self.solver)?;
        check_grid(&self.weights)?;
        self.problem.resolve(base);
        Ok(self)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcpTestSettings {
    pub instances: usize,
    pub max_dim: usize,
    pub seed: u64,
    pub agreement_tol: f64,
}

impl Default for LcpTestSettings {
    fn default() -> Self {
        Self {
            instances: 200,
            max_dim: 10,
            seed: 0,
            agreement_tol: 1e-8,
        }
    }
}

impl LcpTestSettings {
    pub fn finish(mut self, o: &Overrides) -> Result<Self, CliError> {
        if o.touches_solver() || o.w.is_some() {
            return Err(CliError::Config("only --seed applies to lcp-test".into()));
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if self.max_dim == 0 || self.max_dim > 16 {
            return Err(CliError::Config(format!(
                "max_dim must lie in 1..=16, got {}",
                self.max_dim
            )));
        }
        if self.agreement_tol.is_nan() || self.agreement_tol <= 0.0 {
            return Err(CliError::Config(format!(
                "agreement_tol must be positive, got {}",
                self.agreement_tol
            )));
        }
        Ok(self)
    }
}
