//! Whole-graph embeddings of FA-AST corpora.
//!
//! Graph2Vec and the manual metric vector are graph-level. DeepWalk,
//! Node2Vec, HOPE and GraRep embed nodes; their graph vectors are the mean or
//! sum of node vectors. Walk-based methods share one token space (the
//! `(kind, token)` vocabulary) across the corpus, so a node's vector is the
//! vector of its vocabulary entry.

mod factor;
mod graph2vec;
mod sgns;
mod walks;
mod wl;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fa_ast::{CodeGraph, Vocabulary};
use crate::graph::{manual_embed, Digraph, MetricVector};
use crate::stable_hash::{StableHasher, WL_SALT};

pub use factor::{
    adjacency_matrix, default_hope_beta, grarep_fit, grarep_targets, hope_fit, katz_matrix, transition_matrix,
};
pub use graph2vec::{graph2vec_fit, wl_documents, Graph2VecParams};
pub use walks::{random_walks, skipgram_fit, SkipGramModel, SkipGramParams};
pub use wl::{wl_feature_multisets, wl_iterate, wl_relabel};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("invalid embedding config: {0}")]
    Config(String),
    #[error("Katz series diverges: beta {beta} with spectral radius {radius}")]
    BetaTooLarge { beta: f64, radius: f64 },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed embedding file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Graph2vec,
    Deepwalk,
    Node2vec,
    Hope,
    Grarep,
    Manual,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Graph2vec,
        Method::Deepwalk,
        Method::Node2vec,
        Method::Hope,
        Method::Grarep,
        Method::Manual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Graph2vec => "graph2vec",
            Method::Deepwalk => "deepwalk",
            Method::Node2vec => "node2vec",
            Method::Hope => "hope",
            Method::Grarep => "grarep",
            Method::Manual => "manual",
        }
    }

    pub fn is_graph_level(self) -> bool {
        matches!(self, Method::Graph2vec | Method::Manual)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| EmbedError::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Mean,
    Sum,
    None,
}

impl FromStr for Aggregation {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "sum" => Ok(Aggregation::Sum),
            "none" => Ok(Aggregation::None),
            _ => Err(EmbedError::Config(format!("unknown aggregation `{s}`"))),
        }
    }
}

/// Which graphs an embedding may see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// One fit on the whole corpus.
    #[default]
    TrainUnlabeledTest,
    /// Train and unlabeled graphs only. Transductive methods cannot embed the
    /// test graphs under this scope.
    TrainUnlabeled,
    /// Train and unlabeled rows from a fit without the test graphs; test rows
    /// from a second fit on everything.
    SplitSpace,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::TrainUnlabeledTest => "train-unlabeled-test",
            Scope::TrainUnlabeled => "train-unlabeled",
            Scope::SplitSpace => "split-space",
        }
    }
}

impl FromStr for Scope {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Scope::TrainUnlabeledTest, Scope::TrainUnlabeled, Scope::SplitSpace]
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| EmbedError::Config(format!("unknown scope `{s}`")))
    }
}

fn default_dim() -> usize {
    128
}
fn default_wl_iterations() -> usize {
    3
}
fn default_negatives() -> usize {
    5
}
fn default_lr() -> f64 {
    0.025
}
fn default_walks_per_node() -> usize {
    10
}
fn default_walk_length() -> usize {
    40
}
fn default_window() -> usize {
    5
}
fn default_one() -> f64 {
    1.0
}
fn default_grarep_steps() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub method: Method,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Defaults to `none` for graph-level methods and `mean` otherwise.
    #[serde(default)]
    pub aggregation: Option<Aggregation>,
    #[serde(default)]
    pub scope: Scope,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_wl_iterations")]
    pub wl_iterations: usize,
    #[serde(default = "default_negatives")]
    pub negatives: usize,
    /// Defaults to 50 for Graph2Vec and 5 for walk methods.
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_walks_per_node")]
    pub walks_per_node: usize,
    #[serde(default = "default_walk_length")]
    pub walk_length: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_one")]
    pub p: f64,
    #[serde(default = "default_one")]
    pub q: f64,
    #[serde(default)]
    pub hope_beta: Option<f64>,
    #[serde(default = "default_grarep_steps")]
    pub grarep_steps: usize,
}

impl EmbeddingConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            dim: default_dim(),
            aggregation: None,
            scope: Scope::default(),
            seed: 0,
            wl_iterations: default_wl_iterations(),
            negatives: default_negatives(),
            epochs: None,
            lr: default_lr(),
            walks_per_node: default_walks_per_node(),
            walk_length: default_walk_length(),
            window: default_window(),
            p: 1.0,
            q: 1.0,
            hope_beta: None,
            grarep_steps: default_grarep_steps(),
        }
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation.unwrap_or(if self.method.is_graph_level() {
            Aggregation::None
        } else {
            Aggregation::Mean
        })
    }

    pub fn epochs(&self) -> usize {
        self.epochs.unwrap_or(if self.method == Method::Graph2vec { 50 } else { 5 })
    }

    /// Short label such as `graph2vec` or `hope-sum-split-space`.
    pub fn label(&self) -> String {
        let mut s = self.method.as_str().to_string();
        if self.aggregation() == Aggregation::Sum {
            s.push_str("-sum");
        }
        if self.method != Method::Manual && self.scope != Scope::TrainUnlabeledTest {
            s.push('-');
            s.push_str(self.scope.as_str());
        }
        s
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        let err = |m: String| Err(EmbedError::Config(m));
        if self.dim == 0 {
            return err("dim must be positive".into());
        }
        let agg = self.aggregation();
        if self.method.is_graph_level() && agg != Aggregation::None {
            return err(format!("{} is graph-level; aggregation must be none", self.method));
        }
        if !self.method.is_graph_level() && agg == Aggregation::None {
            return err(format!("{} embeds nodes; aggregation must be mean or sum", self.method));
        }
        if self.method != Method::Manual && self.scope == Scope::TrainUnlabeled {
            return err(format!(
                "{} cannot embed test graphs it was not fit on; use split-space",
                self.method
            ));
        }
        match self.method {
            Method::Hope if !self.dim.is_multiple_of(2) => err(format!("hope dim {} must be even", self.dim)),
            Method::Grarep if self.grarep_steps == 0 || !self.dim.is_multiple_of(self.grarep_steps) => err(format!(
                "grarep dim {} must be divisible by {} steps",
                self.dim, self.grarep_steps
            )),
            Method::Node2vec | Method::Deepwalk if self.walk_length == 0 => err("walk-length must be positive".into()),
            Method::Node2vec if !(self.p > 0.0 && self.q > 0.0) => err("p and q must be positive".into()),
            Method::Hope if self.hope_beta.is_some_and(|b| b <= 0.0) => err("hope-beta must be positive".into()),
            _ => Ok(()),
        }
    }
}

/// Row 0 of a split-space embedding belongs to the `TRAIN_SPACE`, test rows to
/// `TEST_SPACE`; single-fit embeddings use `TRAIN_SPACE` throughout.
pub const TRAIN_SPACE: u8 = 0;
pub const TEST_SPACE: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    /// Graph path of each row.
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub config: EmbeddingConfig,
    pub spaces: Vec<u8>,
}

impl EmbeddingMatrix {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Element-wise mean or sum of node vectors; the zero vector for no nodes.
pub fn aggregate(node_vectors: &[Vec<f64>], dim: usize, mode: Aggregation) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for v in node_vectors {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    if mode == Aggregation::Mean && !node_vectors.is_empty() {
        let k = node_vectors.len() as f64;
        out.iter_mut().for_each(|o| *o /= k);
    }
    out
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub(crate) fn sub_seed(seed: u64, i: usize) -> u64 {
    let mut h = StableHasher::with_salt(seed);
    h.write_u64(i as u64);
    h.finish()
}

/// Fits `cfg.method` on `graphs` and returns one vector per graph.
pub fn fit_graphs(graphs: &[&CodeGraph], cfg: &EmbeddingConfig) -> Result<Vec<Vec<f64>>, EmbedError> {
    cfg.validate()?;
    let agg = cfg.aggregation();
    match cfg.method {
        Method::Manual => Ok(graphs.par_iter().map(|g| manual_embed(g).to_vec()).collect()),
        Method::Graph2vec => Ok(graph2vec_fit(
            graphs,
            &Graph2VecParams {
                dim: cfg.dim,
                wl_iterations: cfg.wl_iterations,
                negatives: cfg.negatives,
                epochs: cfg.epochs(),
                lr: cfg.lr,
                seed: cfg.seed,
            },
        )),
        Method::Deepwalk | Method::Node2vec => {
            let (p, q) = if cfg.method == Method::Node2vec { (cfg.p, cfg.q) } else { (1.0, 1.0) };
            let vocab = Vocabulary::build(graphs.iter().copied());
            let ids: Vec<Vec<usize>> = graphs.iter().map(|g| vocab.node_ids(g)).collect();
            let walks: Vec<Vec<usize>> = graphs
                .par_iter()
                .enumerate()
                .map(|(i, g)| {
                    random_walks(
                        &Digraph::from_code_graph(g),
                        cfg.walks_per_node,
                        cfg.walk_length,
                        p,
                        q,
                        sub_seed(cfg.seed, i),
                    )
                    .into_iter()
                    .map(|w| w.into_iter().map(|v| ids[i][v]).collect::<Vec<usize>>())
                    .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect();
            let model = skipgram_fit(
                &walks,
                vocab.size(),
                &SkipGramParams {
                    dim: cfg.dim,
                    window: cfg.window,
                    negatives: cfg.negatives,
                    epochs: cfg.epochs(),
                    lr: cfg.lr,
                    seed: cfg.seed,
                },
            );
            Ok(ids
                .iter()
                .map(|node_ids| {
                    let vs: Vec<Vec<f64>> = node_ids.iter().map(|&t| model.vectors[t].clone()).collect();
                    aggregate(&vs, cfg.dim, agg)
                })
                .collect())
        }
        Method::Hope | Method::Grarep => graphs
            .par_iter()
            .enumerate()
            .map(|(i, g)| {
                let d = Digraph::from_code_graph(g);
                let seed = sub_seed(cfg.seed, i);
                let m = if cfg.method == Method::Hope {
                    hope_fit(&d, cfg.dim, cfg.hope_beta, seed)?
                } else {
                    grarep_fit(&d, cfg.dim, cfg.grarep_steps, seed)?
                };
                Ok(aggregate(&matrix_rows(&m), cfg.dim, agg))
            })
            .collect(),
    }
}

/// Embeds a corpus under the configured scope. `test` lists the test graph
/// indices; training and unlabeled graphs are treated alike.
pub fn embed_corpus(corpus: &[CodeGraph], test: &[usize], cfg: &EmbeddingConfig) -> Result<EmbeddingMatrix, EmbedError> {
    cfg.validate()?;
    let n = corpus.len();
    if let Some(&bad) = test.iter().find(|&&t| t >= n) {
        return Err(EmbedError::Config(format!("test id {bad} outside corpus of {n}")));
    }
    let ids = corpus.iter().map(|g| g.path.clone()).collect();
    let all: Vec<&CodeGraph> = corpus.iter().collect();
    let full = fit_graphs(&all, cfg)?;
    let (rows, spaces) = if cfg.scope == Scope::SplitSpace && cfg.method != Method::Manual {
        let test: HashSet<usize> = test.iter().copied().collect();
        let train_idx: Vec<usize> = (0..n).filter(|i| !test.contains(i)).collect();
        let train_graphs: Vec<&CodeGraph> = train_idx.iter().map(|&i| &corpus[i]).collect();
        let train_rows = fit_graphs(&train_graphs, cfg)?;
        let mut rows = full;
        let mut spaces = vec![TEST_SPACE; n];
        for (i, r) in train_idx.into_iter().zip(train_rows) {
            rows[i] = r;
            spaces[i] = TRAIN_SPACE;
        }
        (rows, spaces)
    } else {
        (full, vec![TRAIN_SPACE; n])
    };
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(EmbedError::Format("non-finite embedding entry".into()));
    }
    Ok(EmbeddingMatrix {
        ids,
        rows,
        config: cfg.clone(),
        spaces,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    config: EmbeddingConfig,
    seed: u64,
    wl_salt: String,
    test_space_rows: Vec<usize>,
    columns: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmbedError + '_ {
    move |source| EmbedError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Sidecar path next to an embedding CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `graph_id,dim_0..` CSV plus a JSON sidecar with the config.
pub fn write_embedding(m: &EmbeddingMatrix, csv_path: &Path) -> Result<(), EmbedError> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut w = csv::Writer::from_path(csv_path).map_err(|e| EmbedError::Format(e.to_string()))?;
    let columns: Vec<String> = if m.config.method == Method::Manual {
        MetricVector::NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..m.dim()).map(|i| format!("dim_{i}")).collect()
    };
    let mut header = vec!["graph_id".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header).map_err(|e| EmbedError::Format(e.to_string()))?;
    for (id, row) in m.ids.iter().zip(&m.rows) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(|x| x.to_string()));
        w.write_record(&rec).map_err(|e| EmbedError::Format(e.to_string()))?;
    }
    w.flush().map_err(io_err(csv_path))?;
    let side = Sidecar {
        config: m.config.clone(),
        seed: m.config.seed,
        wl_salt: format!("{WL_SALT:#018x}"),
        test_space_rows: (0..m.len()).filter(|&i| m.spaces[i] == TEST_SPACE).collect(),
        columns,
    };
    let sp = sidecar_path(csv_path);
    let json = serde_json::to_string_pretty(&side).map_err(|e| EmbedError::Format(e.to_string()))?;
    fs::write(&sp, json + "\n").map_err(io_err(&sp))
}

pub fn read_embedding(csv_path: &Path) -> Result<EmbeddingMatrix, EmbedError> {
    let sp = sidecar_path(csv_path);
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(&sp).map_err(io_err(&sp))?)
        .map_err(|e| EmbedError::Format(format!("{}: {e}", sp.display())))?;
    let mut r = csv::Reader::from_path(csv_path).map_err(|e| EmbedError::Format(e.to_string()))?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| EmbedError::Format(e.to_string()))?;
        let mut it = rec.iter();
        ids.push(it.next().unwrap_or_default().to_string());
        let row = it
            .map(|x| x.parse::<f64>().map_err(|e| EmbedError::Format(format!("`{x}`: {e}"))))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let mut spaces = vec![TRAIN_SPACE; rows.len()];
    for &i in &side.test_space_rows {
        if i < spaces.len() {
            spaces[i] = TEST_SPACE;
        }
    }
    Ok(EmbeddingMatrix {
        ids,
        rows,
        config: side.config,
        spaces,
    })
}
