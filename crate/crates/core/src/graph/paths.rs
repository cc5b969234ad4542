use std::collections::VecDeque;

use super::Digraph;

/// BFS hop counts from `src` over an adjacency list; `None` = unreachable.
pub fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    dist[src] = Some(0);
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes have a distance");
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn adjacency(g: &Digraph, directed: bool) -> Vec<Vec<usize>> {
    if directed {
        g.simple_out()
    } else {
        g.undirected()
    }
}

/// All-pairs hop distances. Row `s` holds distances from `s`.
pub fn shortest_path_lengths(g: &Digraph, directed: bool) -> Vec<Vec<Option<usize>>> {
    let adj = adjacency(g, directed);
    (0..g.node_count()).map(|s| bfs(&adj, s)).collect()
}

/// Mean distance over ordered reachable pairs `(s, t)`, `s != t`.
/// Zero when there are fewer than two nodes or no reachable pair.
pub fn characteristic_path_length(g: &Digraph, directed: bool) -> f64 {
    let adj = adjacency(g, directed);
    cpl_of(&adj)
}

pub(crate) fn cpl_of(adj: &[Vec<usize>]) -> f64 {
    let mut sum = 0usize;
    let mut pairs = 0usize;
    for s in 0..adj.len() {
        for (t, d) in bfs(adj, s).into_iter().enumerate() {
            if let (true, Some(d)) = (t != s, d) {
                sum += d;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum as f64 / pairs as f64
    }
}

/// Mean of `1/d(s,t)` over ordered pairs; unreachable pairs contribute 0.
pub fn global_efficiency(g: &Digraph, directed: bool) -> f64 {
    efficiency_of(&adjacency(g, directed))
}

pub(crate) fn efficiency_of(adj: &[Vec<usize>]) -> f64 {
    let n = adj.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for s in 0..n {
        for (t, d) in bfs(adj, s).into_iter().enumerate() {
            if let (true, Some(d)) = (t != s, d) {
                total += 1.0 / d as f64;
            }
        }
    }
    total / (n * (n - 1)) as f64
}

/// Average over nodes of the global efficiency of the subgraph induced by the
/// node's (undirected) neighbours. Nodes with fewer than two neighbours count 0.
pub fn local_efficiency(g: &Digraph) -> f64 {
    local_efficiency_of(&g.undirected())
}

pub(crate) fn local_efficiency_of(adj: &[Vec<usize>]) -> f64 {
    let n = adj.len();
    if n == 0 {
        return 0.0;
    }
    let mut local = vec![usize::MAX; n];
    let mut total = 0.0;
    for v in 0..n {
        let nbrs = &adj[v];
        if nbrs.len() < 2 {
            continue;
        }
        for (i, &u) in nbrs.iter().enumerate() {
            local[u] = i;
        }
        let sub: Vec<Vec<usize>> = nbrs
            .iter()
            .map(|&u| {
                adj[u]
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect()
            })
            .collect();
        for &u in nbrs {
            local[u] = usize::MAX;
        }
        total += efficiency_of(&sub);
    }
    total / n as f64
}

/// Largest finite distance in the undirected projection.
pub fn diameter(g: &Digraph) -> usize {
    let adj = g.undirected();
    (0..adj.len())
        .flat_map(|s| bfs(&adj, s).into_iter().flatten())
        .max()
        .unwrap_or(0)
}
