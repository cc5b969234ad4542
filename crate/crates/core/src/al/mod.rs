//! Pool-based batch active learning over fixed graph embeddings.

mod oracle;
mod strategy;

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::sub_seed;
use crate::gpr::{pearson, FitOptions, GprError, GprModel, MaternKernel, Nu, PearsonScore};

pub use oracle::{LabelOracle, Phase};
pub use strategy::{
    bootstrap_indices, committee_variance, qbc_from_resamples, select_coreset, select_qbc, select_random,
    select_variance, top_b, QbcOutcome, Strategy,
};

#[derive(Debug, Error)]
pub enum AlError {
    #[error("invalid active-learning config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] GprError),
}

/// Labeled, unlabeled and test ids; each list sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub test: Vec<usize>,
    pub iteration: usize,
}

impl DatasetSplit {
    pub fn total(&self) -> usize {
        self.labeled.len() + self.unlabeled.len() + self.test.len()
    }

    /// True when the three sets are pairwise disjoint and cover `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &i in self.labeled.iter().chain(&self.unlabeled).chain(&self.test) {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Training pool `L ∪ U`, sorted.
    pub fn pool(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.labeled.iter().chain(&self.unlabeled).copied().collect();
        p.sort_unstable();
        p
    }
}

/// Shuffles `0..n` and cuts it into test, initial labeled and unlabeled sets.
pub fn make_splits(n: usize, test_frac: f64, l0: usize, seed: u64) -> Result<DatasetSplit, AlError> {
    if !(0.0..1.0).contains(&test_frac) {
        return Err(AlError::Config(format!("test-frac {test_frac} outside [0, 1)")));
    }
    let n_test = (test_frac * n as f64).round() as usize;
    let pool = n - n_test.min(n);
    if l0 + 1 > pool {
        return Err(AlError::Config(format!(
            "|L0| = {l0} leaves no unlabeled data in a pool of {pool}"
        )));
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let sorted = |s: &[usize]| {
        let mut v = s.to_vec();
        v.sort_unstable();
        v
    };
    Ok(DatasetSplit {
        test: sorted(&ids[..n_test]),
        labeled: sorted(&ids[n_test..n_test + l0]),
        unlabeled: sorted(&ids[n_test + l0..]),
        iteration: 0,
    })
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AlConfig {
    pub strategy: Strategy,
    pub batch_size: usize,
    /// Total labels to acquire, `|L_0|` included. `None` means the whole pool.
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default = "default_committee")]
    pub committee: usize,
    #[serde(default)]
    pub nu: Nu,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    /// Fit and score on `ln(label)`.
    #[serde(default)]
    pub log_target: bool,
    #[serde(default)]
    pub seed: u64,
}

impl AlConfig {
    pub fn new(strategy: Strategy, batch_size: usize) -> Self {
        Self {
            strategy,
            batch_size,
            budget: None,
            committee: default_committee(),
            nu: Nu::default(),
            restarts: default_restarts(),
            max_evals: default_max_evals(),
            log_target: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AlError> {
        if self.batch_size == 0 {
            return Err(AlError::Config("batch size must be positive".into()));
        }
        if self.strategy == Strategy::Qbc && self.committee < 2 {
            return Err(AlError::Config("qbc needs a committee of at least 2".into()));
        }
        Ok(())
    }

    fn fit_options(&self, seed: u64) -> FitOptions {
        FitOptions {
            tune: true,
            kernel: MaternKernel {
                nu: self.nu,
                ..MaternKernel::default()
            },
            restarts: self.restarts,
            max_evals: self.max_evals,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub labels_used: usize,
    pub pearson: f64,
    pub degenerate: bool,
    /// Ids queried after scoring this iteration; empty on the last row.
    pub queried: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlRun {
    pub config: AlConfig,
    pub initial: DatasetSplit,
    pub records: Vec<IterationRecord>,
    pub test_label_reads_during_query: usize,
    /// Set when an iteration failed; `records` holds everything before it.
    pub error: Option<String>,
}

impl AlRun {
    pub fn final_pearson(&self) -> Option<f64> {
        self.records.last().map(|r| r.pearson)
    }

    /// `iteration,labels_used,pearson,queried_ids` with ids joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,labels_used,pearson,queried_ids\n");
        for r in &self.records {
            let ids: Vec<String> = r.queried.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{},{},{},{}", r.iteration, r.labels_used, r.pearson, ids.join(";"));
        }
        s
    }
}

/// Standardizes every column with the mean and std of `pool` rows.
pub fn standardize_features(x: &[Vec<f64>], pool: &[usize]) -> Vec<Vec<f64>> {
    let d = x.first().map_or(0, Vec::len);
    let k = pool.len().max(1) as f64;
    let mut mean = vec![0.0; d];
    for &i in pool {
        for (m, v) in mean.iter_mut().zip(&x[i]) {
            *m += v / k;
        }
    }
    let mut sd = vec![0.0; d];
    for &i in pool {
        for j in 0..d {
            sd[j] += (x[i][j] - mean[j]).powi(2) / k;
        }
    }
    let sd: Vec<f64> = sd.into_iter().map(|v| if v.sqrt() > 1e-12 { v.sqrt() } else { 1.0 }).collect();
    x.iter()
        .map(|r| r.iter().enumerate().map(|(j, v)| (v - mean[j]) / sd[j]).collect())
        .collect()
}

fn targets(labels: &[f64], log: bool) -> Vec<f64> {
    if log {
        labels.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect()
    } else {
        labels.to_vec()
    }
}

fn fit_and_score(
    x: &[Vec<f64>],
    oracle: &LabelOracle,
    train: &[usize],
    test: &[usize],
    opts: &FitOptions,
) -> Result<(GprModel, PearsonScore), AlError> {
    oracle.set_phase(Phase::Fitting);
    let xs: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
    let ys = oracle.labels(train);
    let model = GprModel::fit(&xs, &ys, opts)?;
    let xt: Vec<Vec<f64>> = test.iter().map(|&i| x[i].clone()).collect();
    let pred = model.predict_mean(&xt)?;
    oracle.set_phase(Phase::Scoring);
    let truth = oracle.labels(test);
    oracle.set_phase(Phase::Fitting);
    Ok((model, pearson(&truth, &pred)))
}

/// Runs the query loop until the budget is spent or `U` is empty. Features
/// are standardized with pool statistics; the GP is re-tuned every iteration.
pub fn run_active(x: &[Vec<f64>], labels: &[f64], split: &DatasetSplit, cfg: &AlConfig) -> Result<AlRun, AlError> {
    cfg.validate()?;
    let n = x.len();
    if labels.len() != n || !split.is_partition_of(n) {
        return Err(AlError::Config("split does not partition the embedded corpus".into()));
    }
    if split.labeled.len() < 2 || split.test.len() < 2 {
        return Err(AlError::Config("need at least 2 labeled and 2 test items".into()));
    }
    let oracle = LabelOracle::new(targets(labels, cfg.log_target), &split.test);
    let xs = standardize_features(x, &split.pool());
    let budget = cfg.budget.unwrap_or(split.labeled.len() + split.unlabeled.len());
    let mut labeled = split.labeled.clone();
    let mut unlabeled = split.unlabeled.clone();
    let mut run = AlRun {
        config: cfg.clone(),
        initial: split.clone(),
        records: Vec::new(),
        test_label_reads_during_query: 0,
        error: None,
    };
    for iteration in 0.. {
        let step = (|| -> Result<(PearsonScore, Vec<usize>), AlError> {
            let (model, score) = fit_and_score(
                &xs,
                &oracle,
                &labeled,
                &split.test,
                &cfg.fit_options(sub_seed(cfg.seed, iteration)),
            )?;
            if labeled.len() >= budget || unlabeled.is_empty() {
                return Ok((score, Vec::new()));
            }
            let b = cfg.batch_size.min(unlabeled.len()).min(budget - labeled.len());
            let qseed = sub_seed(cfg.seed ^ 0x51_5545_5259, iteration);
            oracle.set_phase(Phase::Querying);
            let batch = match cfg.strategy {
                Strategy::Random => Ok(select_random(&unlabeled, b, qseed)),
                Strategy::Coreset => Ok(select_coreset(&xs, &labeled, &unlabeled, b)),
                Strategy::Variance => select_variance(&model, &xs, &unlabeled, b),
                Strategy::Qbc => {
                    select_qbc(&model, &xs, &oracle, &labeled, &unlabeled, b, cfg.committee, qseed).map(|o| o.batch)
                }
            };
            oracle.set_phase(Phase::Fitting);
            Ok((score, batch?))
        })();
        match step {
            Ok((score, batch)) => {
                let done = batch.is_empty();
                run.records.push(IterationRecord {
                    iteration,
                    labels_used: labeled.len(),
                    pearson: score.r,
                    degenerate: score.degenerate,
                    queried: batch.clone(),
                });
                if done {
                    break;
                }
                let picked: HashSet<usize> = batch.iter().copied().collect();
                debug_assert!(batch.iter().all(|b| unlabeled.binary_search(b).is_ok()));
                unlabeled.retain(|u| !picked.contains(u));
                labeled.extend(batch);
                labeled.sort_unstable();
            }
            Err(e) => {
                run.error = Some(e.to_string());
                break;
            }
        }
    }
    run.test_label_reads_during_query = oracle.test_reads_while_querying();
    Ok(run)
}

/// Single fit on `split.labeled`, scored on `split.test`.
pub fn run_passive(x: &[Vec<f64>], labels: &[f64], split: &DatasetSplit, cfg: &AlConfig) -> Result<PearsonScore, AlError> {
    let n = x.len();
    if labels.len() != n || !split.is_partition_of(n) {
        return Err(AlError::Config("split does not partition the embedded corpus".into()));
    }
    let oracle = LabelOracle::new(targets(labels, cfg.log_target), &split.test);
    let xs = standardize_features(x, &split.pool());
    let (_, score) = fit_and_score(
        &xs,
        &oracle,
        &split.labeled,
        &split.test,
        &cfg.fit_options(sub_seed(cfg.seed, 0)),
    )?;
    Ok(score)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len();
    if n == 0 {
        return MeanStd { mean: 0.0, std: 0.0, n };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MeanStd { mean, std, n }
}
