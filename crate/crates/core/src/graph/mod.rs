//! Directed multigraphs and the structural metrics behind the manual embedding.
//!
//! Metrics work on the simple projection (parallel edges and self-loops
//! dropped) except `num-edges`, which counts every edge. Path-based metrics,
//! clustering and assortativity use the undirected projection; density and
//! centralities are directed.

mod centrality;
mod digraph;
mod paths;
mod structure;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fa_ast::CodeGraph;

pub use centrality::{betweenness, centralities, closeness, pagerank, pagerank_with, Centralities};
pub use digraph::Digraph;
pub use paths::{
    bfs, characteristic_path_length, diameter, global_efficiency, local_efficiency, shortest_path_lengths,
};
pub use structure::{
    average_degree, degree_assortativity, edge_density, global_clustering_coefficient, local_clustering,
    transitivity, tree_sim, tree_similarity,
};

/// The twelve manual-embedding metrics, in slot order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub char_path_length: f64,
    pub global_efficiency: f64,
    pub local_efficiency: f64,
    pub assortativity: f64,
    pub gcc: f64,
    pub transitivity: f64,
    pub num_nodes: f64,
    pub num_edges: f64,
    pub diameter: f64,
    pub edge_density: f64,
    pub avg_degree: f64,
    pub tree_sim: f64,
}

impl MetricVector {
    pub const LEN: usize = 12;
    pub const NAMES: [&'static str; 12] = [
        "char-path-length",
        "global-efficiency",
        "local-efficiency",
        "assortativity",
        "gcc",
        "transitivity",
        "num-nodes",
        "num-edges",
        "diameter",
        "edge-density",
        "avg-degree",
        "tree-sim",
    ];

    pub fn compute(g: &Digraph) -> Self {
        let und = g.undirected();
        Self {
            char_path_length: paths::cpl_of(&und),
            global_efficiency: paths::efficiency_of(&und),
            local_efficiency: paths::local_efficiency_of(&und),
            assortativity: degree_assortativity(g),
            gcc: global_clustering_coefficient(g),
            transitivity: transitivity(g),
            num_nodes: g.node_count() as f64,
            num_edges: g.edge_count() as f64,
            diameter: diameter(g) as f64,
            edge_density: edge_density(g),
            avg_degree: average_degree(g),
            tree_sim: tree_sim(g),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.char_path_length,
            self.global_efficiency,
            self.local_efficiency,
            self.assortativity,
            self.gcc,
            self.transitivity,
            self.num_nodes,
            self.num_edges,
            self.diameter,
            self.edge_density,
            self.avg_degree,
            self.tree_sim,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES.iter().position(|n| *n == name).map(|i| self.to_vec()[i])
    }
}

/// Metric vector of an FA-AST graph over all of its edges.
pub fn manual_embed(g: &CodeGraph) -> MetricVector {
    MetricVector::compute(&Digraph::from_code_graph(g))
}

/// `path` plus the twelve metric columns, one row per graph.
pub fn metrics_csv(graphs: &[CodeGraph]) -> String {
    let rows: Vec<Vec<f64>> = graphs.par_iter().map(|g| manual_embed(g).to_vec()).collect();
    let mut s = format!("path,{}\n", MetricVector::NAMES.join(","));
    for (g, r) in graphs.iter().zip(rows) {
        let vals: Vec<String> = r.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "{},{}", g.path, vals.join(","));
    }
    s
}
