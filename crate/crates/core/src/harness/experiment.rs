use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::{content_hash, corpus_key, Cache};
use super::config::ExperimentConfig;
use super::ingest::{join, LabelsTable};
use super::plot::{plot_csv, render_svg, Series};
use super::{write_file, HarnessError};
use crate::al::{make_splits, mean_std, run_active, run_passive, AlConfig, AlRun, DatasetSplit, Strategy};
use crate::embed::{embed_corpus, EmbeddingConfig, EmbeddingMatrix, Method, Scope};
use crate::fa_ast::{parse_corpus, CodeGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub use_cache: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { use_cache: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub embedding: String,
    /// `None` for the passive baseline.
    pub strategy: Option<Strategy>,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub graphs: usize,
    pub missing_label: Vec<String>,
    pub missing_file: Vec<String>,
    pub parse_failures: Vec<(String, String)>,
    pub cells: usize,
    pub failed_cells: Vec<FailedCell>,
}

impl ExperimentSummary {
    pub fn all_ok(&self) -> bool {
        self.failed_cells.is_empty()
    }
}

/// One point of an aggregated learning curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub labels_used: usize,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Mean and sample std of Pearson across runs at each `labels_used` value.
pub fn aggregate_runs(runs: &[&AlRun]) -> Vec<CurvePoint> {
    let mut at: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in runs {
        for rec in &r.records {
            at.entry(rec.labels_used).or_default().push(rec.pearson);
        }
    }
    at.into_iter()
        .map(|(labels_used, v)| {
            let ms = mean_std(&v);
            CurvePoint {
                labels_used,
                mean: ms.mean,
                std: ms.std,
                n: ms.n,
            }
        })
        .collect()
}

fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("labels_used,mean,std,n\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{}", p.labels_used, p.mean, p.std, p.n);
    }
    s
}

fn load_graphs(cfg: &ExperimentConfig, cache: &Cache) -> Result<(Vec<CodeGraph>, Vec<(String, String)>, String), HarnessError> {
    let key = corpus_key(&cfg.corpus_dir, cfg.parse_depth)?;
    if let Some((g, f)) = cache.load_graphs(&key) {
        log::info!("graphs: cache hit {}", &key[..12]);
        return Ok((g, f, key));
    }
    let parsed = parse_corpus(&cfg.corpus_dir, cfg.parse_depth)?;
    let failures: Vec<(String, String)> = parsed.failures.into_iter().map(|(p, e)| (p, e.to_string())).collect();
    cache.store_graphs(&key, &parsed.graphs, &failures)?;
    Ok((parsed.graphs, failures, key))
}

fn embed_cached(
    graphs: &[CodeGraph],
    test: &[usize],
    emb: &EmbeddingConfig,
    graphs_key: &str,
    labels: &[f64],
    cache: &Cache,
) -> Result<EmbeddingMatrix, HarnessError> {
    let cfg_json = serde_json::to_vec(emb).expect("serializable");
    let ids: Vec<u8> = graphs.iter().flat_map(|g| g.path.bytes().chain([0])).collect();
    let label_bytes: Vec<u8> = labels.iter().flat_map(|l| l.to_le_bytes()).collect();
    let test_bytes: Vec<u8> = test.iter().flat_map(|t| (*t as u64).to_le_bytes()).collect();
    // the label set decides which graphs survive the join, hence row order
    let key = content_hash(&[graphs_key.as_bytes(), &ids, &label_bytes, &cfg_json, &test_bytes]);
    if let Some(m) = cache.load_embedding(&key) {
        log::info!("{}: cache hit {}", emb.label(), &key[..12]);
        return Ok(m);
    }
    let m = embed_corpus(graphs, test, emb)?;
    cache.store_embedding(&key, &m)?;
    Ok(m)
}

fn al_config(cfg: &ExperimentConfig, strategy: Strategy, seed: u64) -> AlConfig {
    AlConfig {
        strategy,
        batch_size: cfg.batch_size,
        budget: cfg.budget,
        committee: cfg.committee,
        nu: cfg.nu,
        restarts: cfg.restarts,
        max_evals: cfg.max_evals,
        log_target: cfg.log_target,
        seed,
    }
}

fn split_space(emb: &EmbeddingConfig) -> bool {
    emb.scope == Scope::SplitSpace && emb.method != Method::Manual
}

/// Runs every (embedding × strategy × seed) cell plus a passive baseline per
/// (embedding × seed) and writes runs, aggregates, plots and summaries under
/// `cfg.output_dir`. Failing cells are listed in the summary; only problems
/// with the config or the inputs are returned as errors.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentSummary, HarnessError> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    write_file(&out.join("config.json"), cfg.to_json_string())?;
    let cache = if opts.use_cache {
        Cache::from_env(&out.join(".cache"))
    } else {
        Cache::disabled()
    };

    let table = LabelsTable::read(&cfg.labels_file)?;
    let (graphs, failures, graphs_key) = load_graphs(cfg, &cache)?;
    let ing = join(graphs, failures, &table.aggregate(cfg.label_aggregation))?;
    let n = ing.graphs.len();
    log::info!("{n} labeled graphs");

    let splits: Vec<DatasetSplit> = cfg
        .seeds
        .iter()
        .map(|&s| make_splits(n, cfg.test_frac, cfg.l0_size, s))
        .collect::<Result<_, _>>()?;

    // embeddings[e][k] is the matrix used with seed k
    let mut embeddings: Vec<Vec<Result<EmbeddingMatrix, String>>> = Vec::new();
    for emb in &cfg.embeddings {
        log::info!("embedding {}", emb.label());
        if split_space(emb) {
            embeddings.push(
                splits
                    .iter()
                    .map(|sp| {
                        embed_cached(&ing.graphs, &sp.test, emb, &graphs_key, &ing.labels, &cache)
                            .map_err(|e| e.to_string())
                    })
                    .collect(),
            );
        } else {
            let m = embed_cached(&ing.graphs, &[], emb, &graphs_key, &ing.labels, &cache).map_err(|e| e.to_string());
            embeddings.push(vec![m; splits.len()]);
        }
    }

    struct Cell {
        e: usize,
        strategy: Option<Strategy>,
        k: usize,
    }
    let mut cells = Vec::new();
    for e in 0..cfg.embeddings.len() {
        for k in 0..cfg.seeds.len() {
            cells.push(Cell { e, strategy: None, k });
            for &s in &cfg.strategies {
                cells.push(Cell {
                    e,
                    strategy: Some(s),
                    k,
                });
            }
        }
    }
    enum Outcome {
        Active(AlRun),
        Passive(f64),
    }
    let results: Vec<Result<Outcome, String>> = cells
        .par_iter()
        .map(|c| {
            let m = embeddings[c.e][c.k].as_ref().map_err(Clone::clone)?;
            let seed = cfg.seeds[c.k];
            let split = &splits[c.k];
            match c.strategy {
                Some(s) => {
                    let run = run_active(&m.rows, &ing.labels, split, &al_config(cfg, s, seed)).map_err(|e| e.to_string())?;
                    log::info!("{} {} seed {seed}: {:?}", cfg.embeddings[c.e].label(), s, run.final_pearson());
                    Ok(Outcome::Active(run))
                }
                None => {
                    let full = DatasetSplit {
                        labeled: split.pool(),
                        unlabeled: Vec::new(),
                        test: split.test.clone(),
                        iteration: 0,
                    };
                    run_passive(&m.rows, &ing.labels, &full, &al_config(cfg, Strategy::Random, seed))
                        .map(|p| Outcome::Passive(p.r))
                        .map_err(|e| e.to_string())
                }
            }
        })
        .collect();

    let mut failed = Vec::new();
    let mut runs: BTreeMap<(usize, Strategy), Vec<AlRun>> = BTreeMap::new();
    let mut passive: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (c, res) in cells.iter().zip(results) {
        let label = cfg.embeddings[c.e].label();
        let seed = cfg.seeds[c.k];
        let fail = |error: String| FailedCell {
            embedding: label.clone(),
            strategy: c.strategy,
            seed,
            error,
        };
        match res {
            Ok(Outcome::Active(run)) => {
                let s = c.strategy.expect("active cell");
                let dir = out.join("runs").join(&label).join(s.as_str());
                write_file(&dir.join(format!("seed-{seed}.csv")), run.to_csv())?;
                write_file(
                    &dir.join(format!("seed-{seed}.json")),
                    serde_json::to_string_pretty(&run).expect("serializable") + "\n",
                )?;
                if let Some(err) = &run.error {
                    failed.push(fail(err.clone()));
                } else {
                    runs.entry((c.e, s)).or_default().push(run);
                }
            }
            Ok(Outcome::Passive(r)) => passive.entry(c.e).or_default().push(r),
            Err(err) => failed.push(fail(err)),
        }
    }

    let mut curves: BTreeMap<(usize, Strategy), Vec<CurvePoint>> = BTreeMap::new();
    for e in 0..cfg.embeddings.len() {
        for &s in &cfg.strategies {
            let rs: Vec<&AlRun> = runs.get(&(e, s)).map(|v| v.iter().collect()).unwrap_or_default();
            if rs.is_empty() {
                continue;
            }
            let points = aggregate_runs(&rs);
            let name = format!("{}__{}.csv", cfg.embeddings[e].label(), s.as_str());
            write_file(&out.join("aggregate").join(name), curve_csv(&points))?;
            curves.insert((e, s), points);
        }
    }
    write_plots(cfg, &curves, &out.join("plots"))?;
    write_passive(cfg, &passive, out)?;

    let summary = ExperimentSummary {
        graphs: n,
        missing_label: ing.missing_label,
        missing_file: ing.missing_file,
        parse_failures: ing.parse_failures,
        cells: cells.len(),
        failed_cells: failed,
    };
    write_file(
        &out.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
    )?;
    Ok(summary)
}

fn write_plots(
    cfg: &ExperimentConfig,
    curves: &BTreeMap<(usize, Strategy), Vec<CurvePoint>>,
    dir: &Path,
) -> Result<(), HarnessError> {
    for (e, emb) in cfg.embeddings.iter().enumerate() {
        let series: Vec<Series> = cfg
            .strategies
            .iter()
            .filter_map(|s| {
                curves.get(&(e, *s)).map(|p| Series {
                    name: s.to_string(),
                    points: p.clone(),
                })
            })
            .collect();
        if series.is_empty() {
            continue;
        }
        let stem = format!("embedding-{}", emb.label());
        write_file(&dir.join(format!("{stem}.svg")), render_svg(&emb.label(), "labels used", &series))?;
        write_file(&dir.join(format!("{stem}.csv")), plot_csv(&series))?;
    }
    for s in &cfg.strategies {
        let series: Vec<Series> = cfg
            .embeddings
            .iter()
            .enumerate()
            .filter_map(|(e, emb)| {
                curves.get(&(e, *s)).map(|p| Series {
                    name: emb.label(),
                    points: p.clone(),
                })
            })
            .collect();
        if series.is_empty() {
            continue;
        }
        let stem = format!("strategy-{s}");
        write_file(&dir.join(format!("{stem}.svg")), render_svg(s.as_str(), "labels used", &series))?;
        write_file(&dir.join(format!("{stem}.csv")), plot_csv(&series))?;
    }
    Ok(())
}

fn write_passive(cfg: &ExperimentConfig, passive: &BTreeMap<usize, Vec<f64>>, out: &Path) -> Result<(), HarnessError> {
    let mut csv = String::from("embedding,mean,std,n\n");
    let mut md = String::from("| Embedding | Pearson |\n|---|---|\n");
    for (e, emb) in cfg.embeddings.iter().enumerate() {
        let Some(v) = passive.get(&e) else { continue };
        let ms = mean_std(v);
        let _ = writeln!(csv, "{},{},{},{}", emb.label(), ms.mean, ms.std, ms.n);
        let _ = writeln!(md, "| {} | {:.2} ± {:.2} |", emb.label(), ms.mean, ms.std);
    }
    write_file(&out.join("passive.csv"), csv)?;
    write_file(&out.join("passive.md"), md)
}
