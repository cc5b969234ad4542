use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::al::Strategy;
use crate::embed::EmbeddingConfig;
use crate::fa_ast::ParseDepth;
use crate::gpr::Nu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LabelAggregation {
    #[default]
    Mean,
    Median,
}

fn default_seeds() -> Vec<u64> {
    (0..15).collect()
}
fn default_test_frac() -> f64 {
    0.2
}
fn default_committee() -> usize {
    10
}
fn default_restarts() -> usize {
    5
}
fn default_max_evals() -> usize {
    60
}

/// One experiment: every embedding crossed with every strategy and seed.
/// An empty strategy list runs only the passive baseline.
///
/// JSON is the canonical format; TOML files with the same keys are accepted.
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus_dir: PathBuf,
    pub labels_file: PathBuf,
    #[serde(default)]
    pub parse_depth: ParseDepth,
    pub embeddings: Vec<EmbeddingConfig>,
    pub strategies: Vec<Strategy>,
    pub l0_size: usize,
    pub batch_size: usize,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default = "default_test_frac")]
    pub test_frac: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub label_aggregation: LabelAggregation,
    #[serde(default = "default_committee")]
    pub committee: usize,
    #[serde(default)]
    pub nu: Nu,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    #[serde(default)]
    pub log_target: bool,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        toml::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Reads a `.json` or `.toml` file, resolves relative paths and validates.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text)?,
            _ => Self::from_json_str(&text)?,
        };
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.corpus_dir, &mut cfg.labels_file, &mut cfg.output_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.seeds.is_empty() {
            return err("seeds must not be empty");
        }
        if self.seeds.iter().collect::<HashSet<_>>().len() != self.seeds.len() {
            return err("seeds must be distinct");
        }
        if self.embeddings.is_empty() {
            return err("at least one embedding is required");
        }
        if self.batch_size == 0 {
            return err("batch-size must be positive");
        }
        if self.l0_size < 2 {
            return err("l0-size must be at least 2");
        }
        if self.strategies.contains(&Strategy::Qbc) && self.committee < 2 {
            return err("qbc needs a committee of at least 2");
        }
        let mut labels = HashSet::new();
        for e in &self.embeddings {
            e.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
            if !labels.insert(e.label()) {
                return Err(HarnessError::Config(format!("duplicate embedding `{}`", e.label())));
            }
        }
        Ok(())
    }
}
