//! Java source to flow-augmented AST (FA-AST) graphs.
//!
//! Typical use:
//!
//! ```
//! use perfal::fa_ast::{file_level_graph, EdgeKind};
//!
//! let g = file_level_graph("class A { void f() { int x = 1; x++; } }", "A.java").unwrap();
//! assert_eq!(g.count_kind(EdgeKind::NextStatement), 1);
//! assert_eq!(g.count_kind(EdgeKind::NextUse), 1);
//! ```

mod augment;
mod comments;
mod graph;
mod parse;
mod system;
mod vocab;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

pub use augment::augment_flow;
pub use comments::strip_comments;
pub use graph::{AstNode, CodeGraph, Edge, EdgeKind, ParseDepth};
pub use parse::{normalize, parse_ast, parse_ast_with, JavaFrontEnd, RawNode, RawTree, TreeSitterJava};
pub use system::{resolve_corpus, resolve_system_level, DeclarationIndex, ResolutionCycle, SystemResolution};
pub use vocab::{build_vocabulary, VocabKey, Vocabulary};

#[derive(Debug, Error)]
pub enum FaAstError {
    #[error("{path}:{line}:{column}: irrecoverable syntax error")]
    Parse { path: String, line: usize, column: usize },
    #[error("front end failure: {0}")]
    FrontEnd(String),
    #[error("malformed graph document: {0}")]
    Format(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Parse plus flow augmentation at file level.
pub fn file_level_graph(source: &str, path: &str) -> Result<CodeGraph, FaAstError> {
    Ok(augment_flow(&parse_ast(source, path)?))
}

/// Outcome of parsing a source tree.
#[derive(Debug, Default)]
pub struct ParsedCorpus {
    /// Graphs sorted by path.
    pub graphs: Vec<CodeGraph>,
    pub failures: Vec<(String, FaAstError)>,
    pub cycles: Vec<ResolutionCycle>,
}

/// Lists `.java` files under `dir`, sorted, as paths relative to `dir`.
pub fn java_files(dir: &Path) -> Result<Vec<String>, FaAstError> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), FaAstError> {
        let entries = fs::read_dir(dir).map_err(|source| FaAstError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for entry in entries {
            let entry = entry.map_err(|source| FaAstError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            let p = entry.path();
            if p.is_dir() {
                walk(root, &p, out)?;
            } else if p.extension().is_some_and(|e| e == "java") {
                let rel = p.strip_prefix(root).unwrap_or(&p);
                out.push(rel.to_string_lossy().replace('\\', "/"));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out)?;
    out.sort();
    Ok(out)
}

/// Parses every `.java` file under `dir` at the requested depth. Files that
/// fail to parse are reported, not fatal. Graph paths are relative to `dir`.
pub fn parse_corpus(dir: &Path, depth: ParseDepth) -> Result<ParsedCorpus, FaAstError> {
    let files = java_files(dir)?;
    let results: Vec<(String, Result<CodeGraph, FaAstError>)> = files
        .into_par_iter()
        .map(|rel| {
            let full = dir.join(&rel);
            let res = fs::read_to_string(&full)
                .map_err(|source| FaAstError::Io { path: full, source })
                .and_then(|src| file_level_graph(&src, &rel));
            (rel, res)
        })
        .collect();
    let mut corpus = ParsedCorpus::default();
    for (rel, res) in results {
        match res {
            Ok(g) => corpus.graphs.push(g),
            Err(e) => corpus.failures.push((rel, e)),
        }
    }
    if depth == ParseDepth::System {
        let resolved = resolve_corpus(&corpus.graphs);
        corpus.graphs = Vec::with_capacity(resolved.len());
        for r in resolved {
            corpus.cycles.extend(r.cycles);
            corpus.graphs.push(r.graph);
        }
    }
    Ok(corpus)
}

/// File name used when writing a graph document for `path`.
pub fn graph_file_name(path: &str) -> String {
    let stem: String = path
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    format!("{stem}.json")
}

pub fn write_graphs(graphs: &[CodeGraph], out_dir: &Path) -> Result<(), FaAstError> {
    fs::create_dir_all(out_dir).map_err(|source| FaAstError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    for g in graphs {
        let p = out_dir.join(graph_file_name(&g.path));
        fs::write(&p, g.to_json_string()).map_err(|source| FaAstError::Io { path: p, source })?;
    }
    Ok(())
}

/// Reads every `*.json` graph document in `dir`, sorted by graph path.
pub fn read_graphs(dir: &Path) -> Result<Vec<CodeGraph>, FaAstError> {
    let entries = fs::read_dir(dir).map_err(|source| FaAstError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut graphs = Vec::new();
    for entry in entries {
        let p = entry
            .map_err(|source| FaAstError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        if p.extension().is_some_and(|e| e == "json") {
            let s = fs::read_to_string(&p).map_err(|source| FaAstError::Io { path: p.clone(), source })?;
            graphs.push(CodeGraph::from_json_str(&s)?);
        }
    }
    graphs.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(graphs)
}
