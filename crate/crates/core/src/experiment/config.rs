//! Sweep configuration files.
//!
//! ```json
//! {
//!   "problem": {"kind": "matching-pairs", "K": 6, "M": 2},
//!   "instance": {"alphabet_size": 3, "arms": [[0.1, 0.1, 0.8], ...]},
//!   "delta_grid": [1e-3, 1e-4, 1e-5],
//!   "trials": 100,
//!   "algos": ["tasfw", "uniform"],
//!   "seed_base": 0,
//!   "cap": 10000000,
//!   "output": "out/matching-pairs"
//! }
//! ```
//!
//! `instance` may also be a path to an instance file, resolved relative to
//! the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    gen_matching_pairs, gen_nary_partition, gen_odd_arm, ClusteringProblem, InstanceFile,
    ProblemInstance, ProblemKind,
};
use crate::sim::{Algorithm, DEFAULT_CAP};

/// Problem family and size: `{"kind": "nary", "K": 6, "N": 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<ClusteringProblem> {
        match self.kind {
            ProblemKind::MatchingPairs => {
                let m = self
                    .m
                    .ok_or_else(|| Error::Config("matching-pairs needs \"M\"".into()))?;
                gen_matching_pairs(self.k, m)
            }
            ProblemKind::OddArm => gen_odd_arm(self.k),
            ProblemKind::Nary => {
                let n = self
                    .n
                    .ok_or_else(|| Error::Config("nary needs \"N\"".into()))?;
                gen_nary_partition(self.k, n)
            }
            ProblemKind::Custom => Err(Error::Config(
                "custom problems cannot be built from a spec".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum InstanceSource {
    Inline(InstanceFile),
    Path(PathBuf),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: ProblemSpec,
    instance: InstanceSource,
    #[serde(default = "default_grid")]
    delta_grid: Vec<f64>,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default = "default_algos")]
    algos: Vec<Algorithm>,
    #[serde(default)]
    seed_base: u64,
    #[serde(default = "default_cap")]
    cap: u64,
    #[serde(default)]
    output: Option<PathBuf>,
}

fn default_grid() -> Vec<f64> {
    (3..=8).map(|e| 10f64.powi(-e)).collect()
}

fn default_trials() -> usize {
    100
}

fn default_algos() -> Vec<Algorithm> {
    vec![Algorithm::TasFw, Algorithm::Uniform]
}

fn default_cap() -> u64 {
    DEFAULT_CAP
}

/// A validated sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub spec: ProblemSpec,
    pub problem: ClusteringProblem,
    pub instance: ProblemInstance,
    pub delta_grid: Vec<f64>,
    pub trials: usize,
    pub algos: Vec<Algorithm>,
    pub seed_base: u64,
    pub cap: u64,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    /// Builds and validates a config from its parts.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        spec: ProblemSpec,
        instance: ProblemInstance,
        delta_grid: Vec<f64>,
        trials: usize,
        algos: Vec<Algorithm>,
        seed_base: u64,
        cap: u64,
    ) -> Result<Self> {
        let problem = spec.build()?;
        if instance.num_arms() != problem.num_arms() {
            return Err(Error::Config(format!(
                "problem has K={} arms but the instance has {}",
                problem.num_arms(),
                instance.num_arms()
            )));
        }
        if let Some(bad) = delta_grid.iter().find(|d| !(**d > 0.0 && **d < 0.5)) {
            return Err(Error::Config(format!("delta {bad} is outside (0, 0.5)")));
        }
        if delta_grid.is_empty() {
            return Err(Error::Config("delta_grid is empty".into()));
        }
        if delta_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("delta_grid must be strictly decreasing".into()));
        }
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if algos.is_empty() {
            return Err(Error::Config("algos is empty".into()));
        }
        if cap < problem.num_arms() as u64 {
            return Err(Error::CapTooSmall {
                cap,
                num_arms: problem.num_arms(),
            });
        }
        Ok(Self {
            spec,
            problem,
            instance,
            delta_grid,
            trials,
            algos,
            seed_base,
            cap,
            output: None,
        })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<SweepConfig> {
    let raw: RawConfig = read_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let file = match raw.instance {
        InstanceSource::Inline(file) => file,
        InstanceSource::Path(rel) => read_json(&base.join(rel))?,
    };
    let instance = ProblemInstance::try_from(file)?;
    let mut cfg = SweepConfig::new(
        raw.problem,
        instance,
        raw.delta_grid,
        raw.trials,
        raw.algos,
        raw.seed_base,
        raw.cap,
    )?;
    cfg.output = raw.output;
    Ok(cfg)
}

/// Reads a bare instance file.
pub fn read_instance(path: &Path) -> Result<ProblemInstance> {
    ProblemInstance::try_from(read_json::<InstanceFile>(path)?)
}
