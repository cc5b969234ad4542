use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AlError, LabelOracle};
use crate::embed::sub_seed;
use crate::gpr::{euclidean, FitOptions, GprModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Coreset,
    Variance,
    Qbc,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Random, Strategy::Coreset, Strategy::Variance, Strategy::Qbc];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Coreset => "coreset",
            Strategy::Variance => "variance",
            Strategy::Qbc => "qbc",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = AlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| AlError::Config(format!("unknown strategy `{s}`")))
    }
}

/// The `b` ids with the largest scores; ties go to the lowest id.
pub fn top_b(ids: &[usize], scores: &[f64], b: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(ids[i].cmp(&ids[j])));
    order.into_iter().take(b).map(|i| ids[i]).collect()
}

/// Uniform sample of `b` ids without replacement.
pub fn select_random(unlabeled: &[usize], b: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = b.min(unlabeled.len());
    sample(&mut rng, unlabeled.len(), b).into_iter().map(|i| unlabeled[i]).collect()
}

/// k-Center-Greedy: repeatedly take the unlabeled point farthest from the
/// labeled set plus earlier picks. With nothing labeled the lowest id goes first.
pub fn select_coreset(x: &[Vec<f64>], labeled: &[usize], unlabeled: &[usize], b: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = unlabeled.to_vec();
    ids.sort_unstable();
    let mut min_d: Vec<f64> = ids
        .iter()
        .map(|&u| {
            labeled
                .iter()
                .map(|&l| euclidean(&x[u], &x[l]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut taken = vec![false; ids.len()];
    let mut picks = Vec::with_capacity(b);
    for _ in 0..b.min(ids.len()) {
        let mut best: Option<usize> = None;
        for i in 0..ids.len() {
            if taken[i] {
                continue;
            }
            // ids are sorted, so strict comparison keeps the lowest id on ties
            if best.is_none_or(|j| min_d[i] > min_d[j]) {
                best = Some(i);
            }
        }
        let Some(p) = best else { break };
        taken[p] = true;
        picks.push(ids[p]);
        for i in 0..ids.len() {
            if !taken[i] {
                min_d[i] = min_d[i].min(euclidean(&x[ids[i]], &x[ids[p]]));
            }
        }
    }
    picks
}

/// Largest predictive variances under `model`.
pub fn select_variance(model: &GprModel, x: &[Vec<f64>], unlabeled: &[usize], b: usize) -> Result<Vec<usize>, AlError> {
    let rows: Vec<Vec<f64>> = unlabeled.iter().map(|&u| x[u].clone()).collect();
    let (_, var) = model.predict(&rows)?;
    Ok(top_b(unlabeled, &var, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QbcOutcome {
    pub batch: Vec<usize>,
    /// Variance of the members' raw-scale means, aligned with `unlabeled`.
    pub disagreement: Vec<f64>,
    /// Per surviving member, its means over `unlabeled`.
    pub member_means: Vec<Vec<f64>>,
    pub fell_back: bool,
}

/// Population variance of each column of `member_means`.
pub fn committee_variance(member_means: &[Vec<f64>]) -> Vec<f64> {
    let k = member_means.len() as f64;
    let n = member_means.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            let mean = member_means.iter().map(|m| m[i]).sum::<f64>() / k;
            member_means.iter().map(|m| (m[i] - mean) * (m[i] - mean)).sum::<f64>() / k
        })
        .collect()
}

/// Bootstrap resamples (indices into `labeled`), one per committee member.
pub fn bootstrap_indices(n: usize, committee: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::Rng;
    (0..committee)
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, m));
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        })
        .collect()
}

/// Query-by-committee. Members reuse `model`'s kernel (no re-tuning) and are
/// fit on bootstrap resamples of the labeled set; resamples with fewer than
/// two distinct points are skipped. Falls back to the variance strategy when
/// fewer than two members survive.
#[allow(clippy::too_many_arguments)]
pub fn select_qbc(
    model: &GprModel,
    x: &[Vec<f64>],
    oracle: &LabelOracle,
    labeled: &[usize],
    unlabeled: &[usize],
    b: usize,
    committee: usize,
    seed: u64,
) -> Result<QbcOutcome, AlError> {
    let resamples = bootstrap_indices(labeled.len(), committee, seed);
    qbc_from_resamples(model, x, oracle, labeled, unlabeled, b, &resamples)
}

pub fn qbc_from_resamples(
    model: &GprModel,
    x: &[Vec<f64>],
    oracle: &LabelOracle,
    labeled: &[usize],
    unlabeled: &[usize],
    b: usize,
    resamples: &[Vec<usize>],
) -> Result<QbcOutcome, AlError> {
    let y_l = oracle.labels(labeled);
    let rows_u: Vec<Vec<f64>> = unlabeled.iter().map(|&u| x[u].clone()).collect();
    let opts = FitOptions {
        tune: false,
        kernel: *model.kernel(),
        ..FitOptions::default()
    };
    let members: Vec<Option<Vec<f64>>> = resamples
        .par_iter()
        .map(|idx| {
            let mut distinct = idx.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 2 {
                return None;
            }
            let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[labeled[i]].clone()).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| y_l[i]).collect();
            let m = GprModel::fit(&xs, &ys, &opts).ok()?;
            m.predict_mean(&rows_u).ok()
        })
        .collect();
    let member_means: Vec<Vec<f64>> = members.into_iter().flatten().collect();
    if member_means.len() < 2 {
        log::warn!("qbc: only {} usable committee members, using variance", member_means.len());
        return Ok(QbcOutcome {
            batch: select_variance(model, x, unlabeled, b)?,
            disagreement: Vec::new(),
            member_means,
            fell_back: true,
        });
    }
    let disagreement = committee_variance(&member_means);
    Ok(QbcOutcome {
        batch: top_b(unlabeled, &disagreement, b),
        disagreement,
        member_means,
        fell_back: false,
    })
}
