//! Hand-annotated Java fixtures.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use perfal::fa_ast::{file_level_graph, CodeGraph, EdgeKind};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn load(name: &str) -> CodeGraph {
    let p = fixture_dir().join("java").join(name);
    let src = fs::read_to_string(&p).unwrap();
    file_level_graph(&src, name).unwrap()
}

/// Hand-counted edges per kind, one row per fixture.
pub fn expected_counts() -> Vec<(String, HashMap<String, usize>)> {
    let mut r = csv::Reader::from_path(fixture_dir().join("java_edge_counts.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            let counts = header[1..]
                .iter()
                .zip(rec.iter().skip(1))
                .map(|(k, v)| (k.clone(), v.parse().unwrap()))
                .collect();
            (rec[0].to_string(), counts)
        })
        .collect()
}

pub fn find_terminal(g: &CodeGraph, kind: &str, token: &str) -> Vec<usize> {
    g.terminals()
        .into_iter()
        .filter(|&t| g.nodes[t].kind == kind && g.nodes[t].token.as_deref() == Some(token))
        .collect()
}

pub fn has_edge(g: &CodeGraph, src: usize, dst: usize, kind: EdgeKind) -> bool {
    g.edges.iter().any(|e| e.src == src && e.dst == dst && e.kind == kind)
}
