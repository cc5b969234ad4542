use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sgns::{decayed, Sgns};
use super::wl::wl_relabel;
use crate::fa_ast::{CodeGraph, Vocabulary};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph2VecParams {
    pub dim: usize,
    pub wl_iterations: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

/// Every graph's WL features as dense ids, one entry per (node, round).
/// Feature ids follow the sorted order of `(round, label)` keys.
pub fn wl_documents(graphs: &[&CodeGraph], wl_iterations: usize) -> (Vec<Vec<usize>>, usize) {
    let vocab = Vocabulary::build(graphs.iter().copied());
    let rounds: Vec<Vec<Vec<u64>>> = graphs.par_iter().map(|g| wl_relabel(g, &vocab, wl_iterations)).collect();
    let mut keys: BTreeMap<(usize, u64), usize> = BTreeMap::new();
    for r in &rounds {
        for (k, labels) in r.iter().enumerate() {
            for &l in labels {
                keys.insert((k, l), 0);
            }
        }
    }
    for (i, v) in keys.values_mut().enumerate() {
        *v = i;
    }
    let docs = rounds
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .flat_map(|(k, labels)| labels.iter().map(move |&l| (k, l)))
                .map(|key| keys[&key])
                .collect()
        })
        .collect();
    (docs, keys.len())
}

/// Document vectors trained PV-DBOW style: each graph predicts its own WL
/// features against negatives drawn from the feature frequency distribution.
pub fn graph2vec_fit(graphs: &[&CodeGraph], params: &Graph2VecParams) -> Vec<Vec<f64>> {
    let (docs, n_features) = wl_documents(graphs, params.wl_iterations);
    train_documents(&docs, n_features, params)
}

pub(crate) fn train_documents(docs: &[Vec<usize>], n_features: usize, params: &Graph2VecParams) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut counts = vec![0u64; n_features];
    for f in docs.iter().flatten() {
        counts[*f] += 1;
    }
    let mut model = Sgns::new(docs.len(), &counts, params.dim, params.negatives, &mut rng);
    let total: usize = docs.iter().map(Vec::len).sum::<usize>() * params.epochs;
    let mut done = 0;
    let mut order: Vec<usize> = (0..docs.len()).collect();
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &d in &order {
            for &f in &docs[d] {
                let lr = decayed(params.lr, done, total);
                done += 1;
                model.step(d, f, lr, &mut rng);
            }
        }
    }
    model.input_rows()
}
