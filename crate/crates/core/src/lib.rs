//! Toolkit for predicting test-file execution time from source structure.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`fa_ast`] parses Java files into ASTs and augments them with token-order,
//!    sibling, variable-use and control-flow edges (flow-augmented ASTs).
//! 2. [`graph`] computes the structural metrics that make up the hand-built
//!    embedding, plus centralities used for corpus analysis.
//! 3. [`embed`] maps each graph to a vector with Graph2Vec, DeepWalk, Node2Vec,
//!    HOPE, GraRep or the metric vector.
//! 4. [`gpr`] and [`al`] fit Matérn Gaussian processes on labelled vectors and
//!    drive pool-based batch active learning.
//!
//! [`harness`] ties the stages together for the `perfal` command-line tool.

pub mod al;
pub mod embed;
pub mod fa_ast;
pub mod gpr;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod stable_hash;
