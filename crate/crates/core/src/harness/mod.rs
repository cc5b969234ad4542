//! Experiment runner: corpus ingestion, synthetic corpora, multi-seed
//! orchestration, plots and reports.

mod cache;
mod config;
mod experiment;
mod ingest;
mod plot;
mod report;
mod synth;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::al::AlError;
use crate::embed::EmbedError;
use crate::fa_ast::FaAstError;

pub use cache::{content_hash, corpus_key, Cache, CACHE_ENV};
pub use config::{ExperimentConfig, LabelAggregation};
pub use experiment::{
    aggregate_runs, run_experiment, CurvePoint, ExperimentSummary, FailedCell, RunOptions,
};
pub use ingest::{align_labels, ingest, Ingested, LabelsTable};
pub use plot::{plot_csv, render_svg, Series};
pub use report::{best_per_budget, load_aggregates, report, AggregateCurve, NO_RUNS};
pub use synth::{gen_synthetic, synth_files, Block, SynthFile, SynthProgram, SyntheticCorpus};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("labels file: {0}")]
    Labels(String),
    #[error("no source file has both a parseable graph and a label")]
    EmptyIntersection,
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    FaAst(#[from] FaAstError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Al(#[from] AlError),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Errors caused by the user's configuration rather than the run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::Labels(_)
                | HarnessError::EmptyIntersection
                | HarnessError::Embed(EmbedError::Config(_))
                | HarnessError::Al(AlError::Config(_))
        )
    }
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}
