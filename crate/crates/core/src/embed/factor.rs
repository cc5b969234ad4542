use nalgebra::DMatrix;

use super::EmbedError;
use crate::graph::Digraph;
use crate::linalg::{spectral_radius, spectral_radius_estimate, truncated_svd};

/// Graphs up to this size get an exact eigenvalue check of the Katz bound.
const EXACT_RADIUS_LIMIT: usize = 200;

/// Adjacency matrix with edge multiplicities as weights.
pub fn adjacency_matrix(g: &Digraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] += 1.0;
    }
    a
}

/// `0.5 / max out-degree`, which keeps `β·ρ(A) ≤ 0.5`.
pub fn default_hope_beta(g: &Digraph) -> f64 {
    let max_out = (0..g.node_count()).map(|v| g.out_neighbors(v).len()).max().unwrap_or(0);
    if max_out == 0 {
        0.5
    } else {
        0.5 / max_out as f64
    }
}

/// Katz proximity `(I - βA)^-1 βA`.
pub fn katz_matrix(g: &Digraph, beta: f64) -> Result<DMatrix<f64>, EmbedError> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    if g.edge_count() == 0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let radius = if n <= EXACT_RADIUS_LIMIT {
        spectral_radius(&a)
    } else {
        let out: Vec<Vec<usize>> = (0..n).map(|v| g.out_neighbors(v).to_vec()).collect();
        spectral_radius_estimate(&out, 300)
    };
    if beta * radius >= 1.0 - 1e-12 {
        return Err(EmbedError::BetaTooLarge { beta, radius });
    }
    let lhs = DMatrix::identity(n, n) - &a * beta;
    let rhs = a * beta;
    lhs.lu()
        .solve(&rhs)
        .ok_or(EmbedError::BetaTooLarge { beta, radius })
}

/// HOPE node vectors: source half `U√Σ` then target half `V√Σ` of a
/// rank-`dim/2` SVD of the Katz matrix.
pub fn hope_fit(g: &Digraph, dim: usize, beta: Option<f64>, seed: u64) -> Result<DMatrix<f64>, EmbedError> {
    let beta = beta.unwrap_or_else(|| default_hope_beta(g));
    let s = katz_matrix(g, beta)?;
    let half = dim / 2;
    let svd = truncated_svd(&s, half, seed);
    let n = g.node_count();
    let mut out = DMatrix::zeros(n, dim);
    for j in 0..half {
        let w = svd.s[j].sqrt();
        for i in 0..n {
            out[(i, j)] = svd.u[(i, j)] * w;
            out[(i, half + j)] = svd.v[(i, j)] * w;
        }
    }
    Ok(out)
}

/// Row-normalized transition matrix; nodes without out-edges jump uniformly.
pub fn transition_matrix(g: &Digraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut t = adjacency_matrix(g);
    for i in 0..n {
        let s: f64 = t.row(i).sum();
        if s == 0.0 {
            t.row_mut(i).fill(1.0 / n as f64);
        } else {
            t.row_mut(i).scale_mut(1.0 / s);
        }
    }
    t
}

/// GraRep's step-`k` target: `max(0, log(n · T^k))`.
pub fn grarep_targets(g: &Digraph, steps: usize) -> Vec<DMatrix<f64>> {
    let n = g.node_count();
    let t = transition_matrix(g);
    let mut power = DMatrix::identity(n, n);
    (0..steps)
        .map(|_| {
            power = &power * &t;
            power.map(|p| if p > 0.0 { (p * n as f64).ln().max(0.0) } else { 0.0 })
        })
        .collect()
}

/// GraRep node vectors: per step a rank-`dim/steps` factor `U√Σ`, concatenated.
pub fn grarep_fit(g: &Digraph, dim: usize, steps: usize, seed: u64) -> Result<DMatrix<f64>, EmbedError> {
    if steps == 0 || !dim.is_multiple_of(steps) {
        return Err(EmbedError::Config(format!("grarep dim {dim} is not divisible by {steps} steps")));
    }
    let n = g.node_count();
    let per = dim / steps;
    let mut out = DMatrix::zeros(n, dim);
    for (k, x) in grarep_targets(g, steps).iter().enumerate() {
        let svd = truncated_svd(x, per, seed.wrapping_add(k as u64));
        for j in 0..per {
            let w = svd.s[j].sqrt();
            for i in 0..n {
                out[(i, k * per + j)] = svd.u[(i, j)] * w;
            }
        }
    }
    Ok(out)
}
