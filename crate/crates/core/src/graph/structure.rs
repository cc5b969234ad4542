use super::Digraph;

/// Per-node triangle counts in the undirected projection.
fn triangles(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut mark = vec![false; n];
    let mut tri = vec![0usize; n];
    for v in 0..n {
        for &u in &adj[v] {
            mark[u] = true;
        }
        let mut t = 0;
        for &u in &adj[v] {
            t += adj[u].iter().filter(|&&w| mark[w]).count();
        }
        // each triangle through v is seen from both of its other corners
        tri[v] = t / 2;
        for &u in &adj[v] {
            mark[u] = false;
        }
    }
    tri
}

/// Local clustering coefficient of every node (0 below degree 2).
pub fn local_clustering(g: &Digraph) -> Vec<f64> {
    let adj = g.undirected();
    triangles(&adj)
        .into_iter()
        .zip(&adj)
        .map(|(t, a)| {
            let d = a.len();
            if d < 2 {
                0.0
            } else {
                2.0 * t as f64 / (d * (d - 1)) as f64
            }
        })
        .collect()
}

/// Mean local clustering over all nodes.
pub fn global_clustering_coefficient(g: &Digraph) -> f64 {
    let c = local_clustering(g);
    if c.is_empty() {
        0.0
    } else {
        c.iter().sum::<f64>() / c.len() as f64
    }
}

/// `3 * triangles / connected triples`; 0 when there are no triples.
pub fn transitivity(g: &Digraph) -> f64 {
    let adj = g.undirected();
    let closed: usize = triangles(&adj).iter().sum();
    let triads: usize = adj.iter().map(|a| a.len() * a.len().saturating_sub(1) / 2).sum();
    if triads == 0 {
        0.0
    } else {
        closed as f64 / triads as f64
    }
}

/// Degree assortativity: Pearson correlation of the degrees at either end of
/// each undirected edge, counted in both orientations. 0 when undefined.
pub fn degree_assortativity(g: &Digraph) -> f64 {
    let adj = g.undirected();
    let deg: Vec<f64> = adj.iter().map(|a| a.len() as f64).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (u, a) in adj.iter().enumerate() {
        for &v in a {
            xs.push(deg[u]);
            ys.push(deg[v]);
        }
    }
    pearson_or_zero(&xs, &ys)
}

fn pearson_or_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let denom = (sxx * syy).sqrt();
    if denom <= 1e-12 * n as f64 {
        0.0
    } else {
        sxy / denom
    }
}

/// Directed density of the simple projection: `|E| / (n (n - 1))`.
pub fn edge_density(g: &Digraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    g.simple_edge_count() as f64 / (n * (n - 1)) as f64
}

/// Mean undirected degree, `2 |E| / n`.
pub fn average_degree(g: &Digraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    2.0 * g.undirected_edge_count() as f64 / n as f64
}

/// Fraction of the surplus edges (beyond a spanning tree) that are present,
/// out of all possible surplus edges. 0 for trees, 1 for complete graphs.
pub fn tree_similarity(num_nodes: usize, num_edges: usize) -> f64 {
    if num_nodes < 3 {
        return 0.0;
    }
    let n = num_nodes as f64;
    let v = ((num_edges as f64) - (n - 1.0)) / ((n - 1.0) * (n / 2.0 - 1.0));
    v.clamp(0.0, 1.0)
}

/// [`tree_similarity`] on the undirected simple projection.
pub fn tree_sim(g: &Digraph) -> f64 {
    tree_similarity(g.node_count(), g.undirected_edge_count())
}
