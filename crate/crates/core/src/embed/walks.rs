use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgns::{decayed, Sgns};
use crate::graph::Digraph;

/// Truncated random walks over out-edges. Every node starts `walks_per_node`
/// walks. The first step is uniform over out-edges (parallel edges count
/// repeatedly); later steps weight a candidate by `1/p` if it returns to the
/// previous node, `1` if the previous node also links to it, else `1/q`.
/// `p = q = 1` is a plain DeepWalk walk.
pub fn random_walks(g: &Digraph, walks_per_node: usize, walk_length: usize, p: f64, q: f64, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let simple = g.simple_out();
    let n = g.node_count();
    let mut walks = Vec::with_capacity(n * walks_per_node);
    let mut weights = Vec::new();
    for _ in 0..walks_per_node {
        for start in 0..n {
            let mut walk = vec![start];
            while walk.len() < walk_length {
                let cur = *walk.last().expect("walk is non-empty");
                let cands = g.out_neighbors(cur);
                if cands.is_empty() {
                    break;
                }
                let next = if walk.len() == 1 || (p == 1.0 && q == 1.0) {
                    cands[rng.gen_range(0..cands.len())]
                } else {
                    let prev = walk[walk.len() - 2];
                    weights.clear();
                    weights.extend(cands.iter().map(|&x| {
                        if x == prev {
                            1.0 / p
                        } else if simple[prev].binary_search(&x).is_ok() {
                            1.0
                        } else {
                            1.0 / q
                        }
                    }));
                    let total: f64 = weights.iter().sum();
                    let mut r = rng.gen::<f64>() * total;
                    let mut pick = cands.len() - 1;
                    for (i, w) in weights.iter().enumerate() {
                        if r < *w {
                            pick = i;
                            break;
                        }
                        r -= w;
                    }
                    cands[pick]
                };
                walk.push(next);
            }
            walks.push(walk);
        }
    }
    walks
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkipGramParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SkipGramModel {
    /// One input vector per token id.
    pub vectors: Vec<Vec<f64>>,
    /// Mean pair loss of every epoch.
    pub epoch_losses: Vec<f64>,
}

/// Trains skip-gram vectors for tokens `0..vocab_size` on token sequences.
pub fn skipgram_fit(walks: &[Vec<usize>], vocab_size: usize, params: &SkipGramParams) -> SkipGramModel {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut counts = vec![0u64; vocab_size];
    for w in walks.iter().flatten() {
        counts[*w] += 1;
    }
    let mut model = Sgns::new(vocab_size, &counts, params.dim, params.negatives, &mut rng);
    let tokens: usize = walks.iter().map(Vec::len).sum();
    let total = tokens * params.epochs;
    let mut done = 0;
    let mut epoch_losses = Vec::with_capacity(params.epochs);
    for _ in 0..params.epochs {
        let (mut loss, mut pairs) = (0.0, 0usize);
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lr = decayed(params.lr, done, total);
                done += 1;
                let lo = i.saturating_sub(params.window);
                let hi = (i + params.window + 1).min(walk.len());
                for (j, &ctx) in walk.iter().enumerate().take(hi).skip(lo) {
                    if j != i {
                        loss += model.step(center, ctx, lr, &mut rng);
                        pairs += 1;
                    }
                }
            }
        }
        epoch_losses.push(if pairs == 0 { 0.0 } else { loss / pairs as f64 });
    }
    SkipGramModel {
        vectors: model.input_rows(),
        epoch_losses,
    }
}
