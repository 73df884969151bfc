//! Experiment and benchmark configuration files.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use snapshot_ilp::bagging::{BagConfig, DEFAULT_BAG_SEEDS};
use snapshot_ilp::ensemble::{DEFAULT_ALPHA, DEFAULT_BETA};
use snapshot_ilp::eval::DEFAULT_ATOM_CAP;
use snapshot_ilp::{CostFunctionId, PoolFilter, SearchOptions};

use crate::error::{HarnessError, Result};

/// The only generator the harness uses for splits and bootstrap samples.
pub const PRNG: &str = "chacha8";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Per-search timeout in seconds.
    pub timeout_s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub filter: PoolFilter,
    pub prune: bool,
    pub atom_cap: usize,
    pub prng: String,
    /// Bagging is skipped when absent.
    pub bagging: Option<BaggingConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaggingConfig {
    pub seeds: Vec<u64>,
}

impl Default for BaggingConfig {
    fn default() -> Self {
        BaggingConfig {
            seeds: DEFAULT_BAG_SEEDS.to_vec(),
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            timeout_s: 10.0,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            filter: PoolFilter::Full,
            prune: true,
            atom_cap: DEFAULT_ATOM_CAP,
            prng: PRNG.into(),
            bagging: Some(BaggingConfig::default()),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return Err(HarnessError::Config(format!("timeout_s must be positive, got {}", self.timeout_s)));
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(HarnessError::Config("alpha and beta must be non-negative".into()));
        }
        if self.prng != PRNG {
            return Err(HarnessError::Config(format!(
                "unsupported prng {:?}; only {PRNG:?} is available",
                self.prng
            )));
        }
        if let Some(b) = &self.bagging {
            if b.seeds.is_empty() {
                return Err(HarnessError::Config("bagging needs at least one seed".into()));
            }
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_s)
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            prune: self.prune,
            atom_cap: self.atom_cap,
        }
    }

    pub fn bag_config(&self) -> Option<Result<BagConfig>> {
        self.bagging.as_ref().map(|b| {
            BagConfig::new(b.seeds.clone(), self.timeout()).map_err(HarnessError::Core)
        })
    }
}

/// A multi-task, multi-seed sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Task directories, relative to the config file.
    pub tasks: Vec<PathBuf>,
    #[serde(default = "all_costs")]
    pub cost_fns: Vec<CostFunctionId>,
    /// One trial per seed; the seed drives the split.
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

fn all_costs() -> Vec<CostFunctionId> {
    CostFunctionId::ALL.to_vec()
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: BenchConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.experiment.validate()?;
        if cfg.tasks.is_empty() || cfg.seeds.is_empty() || cfg.cost_fns.is_empty() {
            return Err(HarnessError::Config("tasks, seeds and cost_fns must be non-empty".into()));
        }
        Ok(cfg)
    }

    /// Reads a config and resolves task paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for t in &mut cfg.tasks {
            if t.is_relative() {
                *t = base.join(&*t);
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bench_file() {
        let cfg = BenchConfig::parse(
            r#"
tasks = ["tasks/kinship"]
cost_fns = ["mdl", "lexfnsize"]
seeds = [1, 2]

[experiment]
timeout_s = 5
filter = "optimal"

[experiment.bagging]
seeds = [43, 44, 45]
"#,
        )
        .unwrap();
        assert_eq!(cfg.cost_fns, vec![CostFunctionId::Mdl, CostFunctionId::Lexfnsize]);
        assert_eq!(cfg.experiment.filter, PoolFilter::OptimalOnly);
        assert_eq!(cfg.experiment.alpha, DEFAULT_ALPHA);
        assert_eq!(cfg.experiment.timeout(), Duration::from_secs(5));
        assert_eq!(cfg.experiment.bagging.unwrap().seeds, vec![43, 44, 45]);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(BenchConfig::parse("tasks = []\nseeds = [1]").is_err());
        assert!(BenchConfig::parse("tasks = [\"a\"]\nseeds = [1]\n[experiment]\nprng = \"pcg\"").is_err());
        assert!(BenchConfig::parse("tasks = [\"a\"]\nseeds = [1]\n[experiment]\ntimeout_s = 0").is_err());
        assert!(BenchConfig::parse("tasks = [\"a\"]\nseeds = [1]\nfoo = 2").is_err());
    }
}
