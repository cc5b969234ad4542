use crate::fa_ast::{CodeGraph, Vocabulary};
use crate::stable_hash::{StableHasher, WL_SALT};

/// Weisfeiler-Lehman labels per iteration. Row 0 holds the vocabulary ids;
/// row `k` hashes each node's row `k-1` label with the sorted labels of its
/// out-neighbours over every edge kind. Parallel edges contribute repeatedly.
pub fn wl_relabel(g: &CodeGraph, vocab: &Vocabulary, iterations: usize) -> Vec<Vec<u64>> {
    let init: Vec<u64> = vocab.node_ids(g).into_iter().map(|i| i as u64).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    for e in &g.edges {
        out[e.src].push(e.dst);
    }
    wl_iterate(&out, init, iterations)
}

/// WL over plain adjacency lists with caller-supplied initial labels.
pub fn wl_iterate(out: &[Vec<usize>], init: Vec<u64>, iterations: usize) -> Vec<Vec<u64>> {
    let mut rounds = Vec::with_capacity(iterations + 1);
    rounds.push(init);
    let mut nbr = Vec::new();
    for _ in 0..iterations {
        let prev = rounds.last().expect("at least the initial round");
        let next = out
            .iter()
            .enumerate()
            .map(|(v, vs)| {
                nbr.clear();
                nbr.extend(vs.iter().map(|&u| prev[u]));
                nbr.sort_unstable();
                let mut h = StableHasher::with_salt(WL_SALT);
                h.write_u64(prev[v]);
                h.write_u64(nbr.len() as u64);
                for &l in &nbr {
                    h.write_u64(l);
                }
                h.finish()
            })
            .collect();
        rounds.push(next);
    }
    rounds
}

/// Sorted label multiset of every round.
pub fn wl_feature_multisets(rounds: &[Vec<u64>]) -> Vec<Vec<u64>> {
    rounds
        .iter()
        .map(|r| {
            let mut s = r.clone();
            s.sort_unstable();
            s
        })
        .collect()
}
