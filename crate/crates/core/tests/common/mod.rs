//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod al;
pub mod fixtures;
pub mod gpr;

use perfal::graph::Digraph;
use rand::Rng;

const INF: f64 = f64::INFINITY;

/// Random multigraph on 1..=8 nodes, with occasional parallel edges and self-loops.
pub fn random_small_digraph(rng: &mut impl Rng) -> Digraph {
    let n = rng.gen_range(1..=8);
    let p: f64 = rng.gen_range(0.05..0.7);
    let mut g = Digraph::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                g.add_edge(u, v);
                if rng.gen_bool(0.1) {
                    g.add_edge(u, v);
                }
            }
        }
        if rng.gen_bool(0.1) {
            g.add_edge(u, u);
        }
    }
    g
}

pub fn directed_matrix(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        if u != v {
            m[u][v] = true;
        }
    }
    m
}

pub fn undirected_matrix(g: &Digraph) -> Vec<Vec<bool>> {
    let d = directed_matrix(g);
    let n = d.len();
    (0..n).map(|i| (0..n).map(|j| d[i][j] || d[j][i]).collect()).collect()
}

pub fn floyd_warshall(a: &[Vec<bool>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1.0;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn efficiency(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let d = floyd_warshall(a);
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j].is_finite() {
                s += 1.0 / d[i][j];
            }
        }
    }
    s / (n * (n - 1)) as f64
}

/// The twelve metric slots, computed from adjacency matrices.
pub fn metric_oracle(g: &Digraph) -> [f64; 12] {
    let n = g.node_count();
    let a = undirected_matrix(g);
    let dm = directed_matrix(g);
    let d = floyd_warshall(&a);
    let deg: Vec<usize> = a.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();

    let (mut sum, mut pairs, mut diam) = (0.0, 0usize, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j].is_finite() {
                sum += d[i][j];
                pairs += 1;
                diam = diam.max(d[i][j]);
            }
        }
    }
    let cpl = if pairs == 0 { 0.0 } else { sum / pairs as f64 };

    let mut local = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| a[v][u]).collect();
        if nb.len() < 2 {
            continue;
        }
        let sub: Vec<Vec<bool>> = nb.iter().map(|&i| nb.iter().map(|&j| a[i][j]).collect()).collect();
        local += efficiency(&sub);
    }
    let local = if n == 0 { 0.0 } else { local / n as f64 };

    // Newman's edge-list formula
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| a[i][j]).collect();
    let m = edges.len() as f64;
    let assort = if edges.is_empty() {
        0.0
    } else {
        let (mut jk, mut half, mut sq) = (0.0, 0.0, 0.0);
        for &(i, j) in &edges {
            let (x, y) = (deg[i] as f64, deg[j] as f64);
            jk += x * y;
            half += 0.5 * (x + y);
            sq += 0.5 * (x * x + y * y);
        }
        let mean = half / m;
        let den = sq / m - mean * mean;
        if den.abs() < 1e-12 {
            0.0
        } else {
            (jk / m - mean * mean) / den
        }
    };

    let mut gcc = 0.0;
    let mut triads = 0usize;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| a[v][u]).collect();
        let k = nb.len();
        triads += k * k.saturating_sub(1) / 2;
        if k < 2 {
            continue;
        }
        let mut closed = 0;
        for x in 0..k {
            for y in x + 1..k {
                if a[nb[x]][nb[y]] {
                    closed += 1;
                }
            }
        }
        gcc += closed as f64 / (k * (k - 1) / 2) as f64;
    }
    let gcc = if n == 0 { 0.0 } else { gcc / n as f64 };
    let mut tri = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if a[i][j] && a[j][k] && a[i][k] {
                    tri += 1;
                }
            }
        }
    }
    let trans = if triads == 0 { 0.0 } else { 3.0 * tri as f64 / triads as f64 };

    let arcs = dm.iter().flatten().filter(|&&x| x).count();
    let density = if n < 2 { 0.0 } else { arcs as f64 / (n * (n - 1)) as f64 };
    let avg = if n == 0 { 0.0 } else { 2.0 * m / n as f64 };
    let ts = if n < 3 {
        0.0
    } else {
        let nf = n as f64;
        ((m - (nf - 1.0)) / ((nf - 1.0) * (nf / 2.0 - 1.0))).clamp(0.0, 1.0)
    };

    [
        cpl,
        efficiency(&a),
        local,
        assort,
        gcc,
        trans,
        n as f64,
        g.edge_count() as f64,
        diam,
        density,
        avg,
        ts,
    ]
}

/// Directed betweenness by enumerating every simple path between each pair.
pub fn betweenness_by_paths(g: &Digraph) -> Vec<f64> {
    let a = directed_matrix(g);
    let n = a.len();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![s];
            let mut seen = vec![false; n];
            seen[s] = true;
            all_paths(&a, t, &mut stack, &mut seen, &mut paths);
            let Some(best) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == best).collect();
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                let through = shortest.iter().filter(|p| p.contains(&v)).count();
                bc[v] += through as f64 / shortest.len() as f64;
            }
        }
    }
    bc
}

fn all_paths(a: &[Vec<bool>], t: usize, stack: &mut Vec<usize>, seen: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let u = *stack.last().unwrap();
    if u == t {
        out.push(stack.clone());
        return;
    }
    for v in 0..a.len() {
        if a[u][v] && !seen[v] {
            seen[v] = true;
            stack.push(v);
            all_paths(a, t, stack, seen, out);
            stack.pop();
            seen[v] = false;
        }
    }
}

/// Closeness from a Floyd-Warshall matrix, incoming distances, reachable-fraction scaling.
pub fn closeness_oracle(g: &Digraph) -> Vec<f64> {
    let d = floyd_warshall(&directed_matrix(g));
    let n = d.len();
    (0..n)
        .map(|v| {
            let reach: Vec<f64> = (0..n).filter(|&u| u != v && d[u][v].is_finite()).map(|u| d[u][v]).collect();
            let total: f64 = reach.iter().sum();
            if total == 0.0 || n < 2 {
                0.0
            } else {
                let r = reach.len() as f64;
                (r / total) * (r / (n - 1) as f64)
            }
        })
        .collect()
}

/// PageRank as the stationary vector of the dense Google matrix, by power iteration.
pub fn pagerank_oracle(g: &Digraph, damping: f64) -> Vec<f64> {
    let a = directed_matrix(g);
    let n = a.len();
    let nf = n as f64;
    let mut gm = vec![vec![0.0; n]; n];
    for i in 0..n {
        let out = a[i].iter().filter(|&&x| x).count();
        for j in 0..n {
            let step = if out == 0 {
                1.0 / nf
            } else if a[i][j] {
                1.0 / out as f64
            } else {
                0.0
            };
            gm[i][j] = damping * step + (1.0 - damping) / nf;
        }
    }
    let mut x = vec![1.0 / nf; n];
    for _ in 0..10_000 {
        let next: Vec<f64> = (0..n).map(|j| (0..n).map(|i| x[i] * gm[i][j]).sum()).collect();
        let diff: f64 = next.iter().zip(&x).map(|(p, q)| (p - q).abs()).sum();
        x = next;
        if diff < 1e-15 {
            break;
        }
    }
    x
}

/// Random labelled tree: each node in a shuffled order attaches to an earlier one.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Digraph {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut g = Digraph::new(n);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        if rng.gen_bool(0.5) {
            g.add_edge(parent, order[i]);
        } else {
            g.add_edge(order[i], parent);
        }
    }
    g
}

pub fn complete(n: usize) -> Digraph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push((i, j));
        }
    }
    Digraph::from_undirected(n, e)
}

pub fn cycle(n: usize) -> Digraph {
    Digraph::from_undirected(n, (0..n).map(|i| (i, (i + 1) % n)))
}
