//! On-disk cache for parsed graphs and embeddings, keyed by content hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::embed::{read_embedding, write_embedding, EmbeddingMatrix};
use crate::fa_ast::{java_files, read_graphs, write_graphs, CodeGraph, ParseDepth};

pub const CACHE_ENV: &str = "PERFAL_CACHE_DIR";

/// SHA-256 over length-prefixed parts, as lowercase hex.
pub fn content_hash(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    format!("{:x}", h.finalize())
}

/// Hash of every `.java` file under `dir` (path and bytes), the parse depth
/// and the crate version.
pub fn corpus_key(dir: &Path, depth: ParseDepth) -> Result<String, HarnessError> {
    let mut parts: Vec<Vec<u8>> = vec![env!("CARGO_PKG_VERSION").into(), depth.to_string().into()];
    for rel in java_files(dir)? {
        let p = dir.join(&rel);
        parts.push(rel.into_bytes());
        parts.push(fs::read(&p).map_err(|e| HarnessError::io(&p, e))?);
    }
    let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    Ok(content_hash(&refs))
}

#[derive(Debug, Serialize, Deserialize)]
struct Failures {
    failures: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: PathBuf) -> Self {
        Self { dir: Some(dir) }
    }

    /// `$PERFAL_CACHE_DIR` when set, otherwise `fallback`.
    pub fn from_env(fallback: &Path) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Self::at(PathBuf::from(d)),
            _ => Self::at(fallback.to_path_buf()),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn entry(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(kind).join(key))
    }

    pub fn load_graphs(&self, key: &str) -> Option<(Vec<CodeGraph>, Vec<(String, String)>)> {
        let dir = self.entry("graphs", key)?;
        let failures: Failures = serde_json::from_str(&fs::read_to_string(dir.join("failures.json")).ok()?).ok()?;
        let graphs = read_graphs(&dir.join("graphs")).ok()?;
        Some((graphs, failures.failures))
    }

    pub fn store_graphs(&self, key: &str, graphs: &[CodeGraph], failures: &[(String, String)]) -> Result<(), HarnessError> {
        let Some(dir) = self.entry("graphs", key) else {
            return Ok(());
        };
        publish(&dir, |tmp| {
            write_graphs(graphs, &tmp.join("graphs"))?;
            let f = Failures {
                failures: failures.to_vec(),
            };
            let p = tmp.join("failures.json");
            fs::write(&p, serde_json::to_string(&f).expect("serializable")).map_err(|e| HarnessError::io(&p, e))
        })
    }

    pub fn load_embedding(&self, key: &str) -> Option<EmbeddingMatrix> {
        let dir = self.entry("embeddings", key)?;
        read_embedding(&dir.join("embedding.csv")).ok()
    }

    pub fn store_embedding(&self, key: &str, m: &EmbeddingMatrix) -> Result<(), HarnessError> {
        let Some(dir) = self.entry("embeddings", key) else {
            return Ok(());
        };
        publish(&dir, |tmp| Ok(write_embedding(m, &tmp.join("embedding.csv"))?))
    }
}

/// Fills a scratch directory and renames it into place, so readers never see
/// a half-written entry.
fn publish(dir: &Path, fill: impl FnOnce(&Path) -> Result<(), HarnessError>) -> Result<(), HarnessError> {
    if dir.exists() {
        return Ok(());
    }
    let parent = dir.parent().expect("cache entries are nested");
    fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    let tmp = parent.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        dir.file_name().and_then(|s| s.to_str()).unwrap_or("entry")
    ));
    let _ = fs::remove_dir_all(&tmp);
    fs::create_dir_all(&tmp).map_err(|e| HarnessError::io(&tmp, e))?;
    fill(&tmp)?;
    if fs::rename(&tmp, dir).is_err() {
        // another writer won the race
        let _ = fs::remove_dir_all(&tmp);
    }
    Ok(())
}
