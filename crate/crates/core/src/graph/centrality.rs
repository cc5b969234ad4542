use std::collections::VecDeque;

use super::paths::bfs;
use super::Digraph;

#[derive(Debug, Clone, PartialEq)]
pub struct Centralities {
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    pub pagerank: Vec<f64>,
}

/// Exact unnormalized betweenness (Brandes). In undirected mode every pair is
/// counted once.
pub fn betweenness(g: &Digraph, directed: bool) -> Vec<f64> {
    let adj = if directed { g.simple_out() } else { g.undirected() };
    let n = adj.len();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        sigma.iter_mut().for_each(|x| *x = 0.0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        delta.iter_mut().for_each(|x| *x = 0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    if !directed {
        bc.iter_mut().for_each(|x| *x /= 2.0);
    }
    bc
}

/// Closeness from incoming distances, scaled by the reachable fraction
/// (Wasserman and Faust) so disconnected graphs stay comparable.
pub fn closeness(g: &Digraph) -> Vec<f64> {
    let rev = g.simple_in();
    let n = rev.len();
    (0..n)
        .map(|v| {
            let d = bfs(&rev, v);
            let (mut total, mut reach) = (0usize, 0usize);
            for (u, du) in d.into_iter().enumerate() {
                if let (true, Some(du)) = (u != v, du) {
                    total += du;
                    reach += 1;
                }
            }
            if total == 0 || n < 2 {
                0.0
            } else {
                let r = reach as f64;
                (r / total as f64) * (r / (n - 1) as f64)
            }
        })
        .collect()
}

/// PageRank with damping 0.85 on the simple directed projection. Dangling
/// nodes spread their mass uniformly.
pub fn pagerank(g: &Digraph) -> Vec<f64> {
    pagerank_with(g, 0.85, 1e-9, 200)
}

pub fn pagerank_with(g: &Digraph, damping: f64, tol: f64, max_iter: usize) -> Vec<f64> {
    let out = g.simple_out();
    let n = out.len();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        let dangling: f64 = (0..n).filter(|&v| out[v].is_empty()).map(|v| rank[v]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for (v, vs) in out.iter().enumerate() {
            if vs.is_empty() {
                continue;
            }
            let share = damping * rank[v] / vs.len() as f64;
            for &w in vs {
                next[w] += share;
            }
        }
        let err: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if err < nf * tol {
            break;
        }
    }
    rank
}

/// Directed betweenness, closeness and PageRank for every node.
pub fn centralities(g: &Digraph) -> Centralities {
    Centralities {
        betweenness: betweenness(g, true),
        closeness: closeness(g),
        pagerank: pagerank(g),
    }
}
