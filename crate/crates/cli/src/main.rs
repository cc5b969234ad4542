use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use perfal::al::{make_splits, mean_std, run_active, run_passive, AlConfig, DatasetSplit, Strategy};
use perfal::embed::{embed_corpus, read_embedding, write_embedding, EmbeddingConfig, Method, Scope};
use perfal::fa_ast::{parse_corpus, read_graphs, write_graphs, ParseDepth};
use perfal::graph::metrics_csv;
use perfal::harness::{
    align_labels, gen_synthetic, report, run_experiment, ExperimentConfig, HarnessError, LabelAggregation,
    LabelsTable, RunOptions,
};

#[derive(Parser)]
#[command(name = "perfal", version, about = "Test execution-time prediction from source-code graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse Java sources into FA-AST graph documents
    Parse {
        #[arg(long)]
        src: PathBuf,
        #[arg(long, default_value = "file")]
        depth: ParseDepth,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the manual-embedding metrics of every graph
    Metrics {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a directory of graphs
    Embed(EmbedArgs),
    /// Passive baseline: fit on the whole pool, score on the test split
    Passive(PassiveArgs),
    /// Active learning, or a full experiment with --config
    Active(ActiveArgs),
    /// Generate a synthetic corpus with known durations
    Synth {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a result directory as markdown
    Report {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    graphs: PathBuf,
    /// JSON embedding config; replaces the method flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "graph2vec")]
    method: Method,
    #[arg(long, default_value_t = 128)]
    dim: usize,
    #[arg(long, default_value = "train-unlabeled-test")]
    scope: Scope,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON split whose `test` ids select the test graphs
    #[arg(long)]
    split: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SingleRun {
    /// Embedding CSV from `perfal embed`
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// `path,duration_ms` label CSV
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    test_frac: f64,
    #[arg(long, default_value = "mean")]
    aggregation: String,
    #[arg(long)]
    log_target: bool,
}

#[derive(Args)]
struct PassiveArgs {
    /// Experiment config; runs the passive baseline for every embedding and seed
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    run: SingleRun,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
}

#[derive(Args)]
struct ActiveArgs {
    /// Experiment config; runs every embedding × strategy × seed cell
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    run: SingleRun,
    #[arg(long, default_value = "random")]
    strategy: Strategy,
    #[arg(long, default_value_t = 30)]
    l0: usize,
    #[arg(long, default_value_t = 20)]
    batch: usize,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run CSV; a JSON snapshot is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
    Partial(usize),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<HarnessError>() {
            Some(h) if h.is_config() => Failure::Config(e),
            _ => Failure::Run(e),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(n)) => {
            eprintln!("{n} cell(s) failed; see summary.json");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Parse { src, depth, out } => {
            let corpus = parse_corpus(&src, depth).context("parsing corpus")?;
            for (p, e) in &corpus.failures {
                eprintln!("skipped {p}: {e}");
            }
            write_graphs(&corpus.graphs, &out).context("writing graphs")?;
            println!("{} graphs written to {}", corpus.graphs.len(), out.display());
            Ok(())
        }
        Cmd::Metrics { graphs, out } => {
            let gs = read_graphs(&graphs).context("reading graphs")?;
            write(&out, metrics_csv(&gs))?;
            Ok(())
        }
        Cmd::Embed(a) => embed(a),
        Cmd::Passive(a) => passive(a),
        Cmd::Active(a) => active(a),
        Cmd::Synth { n, seed, out } => {
            let c = gen_synthetic(n, seed, &out)?;
            println!("{} files in {}, labels in {}", c.files.len(), c.source_dir.display(), c.labels_file.display());
            Ok(())
        }
        Cmd::Report { dir, out } => {
            let text = report(&dir)?;
            match out {
                Some(p) => write(&p, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn write(path: &Path, contents: String) -> Result<(), Failure> {
    if let Some(d) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn embed(a: EmbedArgs) -> Result<(), Failure> {
    let cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<EmbeddingConfig>(&text).map_err(config_err)?
        }
        None => EmbeddingConfig {
            dim: a.dim,
            scope: a.scope,
            seed: a.seed,
            ..EmbeddingConfig::new(a.method)
        },
    };
    cfg.validate().map_err(config_err)?;
    let graphs = read_graphs(&a.graphs).context("reading graphs")?;
    let test = match &a.split {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<DatasetSplit>(&text).map_err(config_err)?.test
        }
        None if cfg.scope == Scope::SplitSpace && cfg.method != Method::Manual => {
            return Err(config_err(anyhow!("split-space scope needs --split")));
        }
        None => Vec::new(),
    };
    let m = embed_corpus(&graphs, &test, &cfg).context("embedding")?;
    write_embedding(&m, &a.out).context("writing embedding")?;
    Ok(())
}

fn load_single(run: &SingleRun) -> Result<(Vec<Vec<f64>>, Vec<f64>), Failure> {
    let (Some(emb), Some(labels)) = (&run.embedding, &run.labels) else {
        return Err(config_err(anyhow!("--embedding and --labels are required without --config")));
    };
    let how = match run.aggregation.as_str() {
        "mean" => LabelAggregation::Mean,
        "median" => LabelAggregation::Median,
        other => return Err(config_err(anyhow!("unknown aggregation `{other}`"))),
    };
    let m = read_embedding(emb).context("reading embedding")?;
    let table = LabelsTable::read(labels)?.aggregate(how);
    let (rows, ys) = align_labels(&m.ids, &table)?;
    Ok((rows.into_iter().map(|i| m.rows[i].clone()).collect(), ys))
}

fn experiment(path: &Path, no_cache: bool, passive_only: bool) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::load(path)?;
    if passive_only {
        cfg.strategies.clear();
    } else if cfg.strategies.is_empty() {
        return Err(config_err(anyhow!("config lists no strategies")));
    }
    let summary = run_experiment(&cfg, RunOptions { use_cache: !no_cache })?;
    println!(
        "{} graphs, {} cells, results in {}",
        summary.graphs,
        summary.cells,
        cfg.output_dir.display()
    );
    if summary.all_ok() {
        Ok(())
    } else {
        Err(Failure::Partial(summary.failed_cells.len()))
    }
}

fn passive(a: PassiveArgs) -> Result<(), Failure> {
    if let Some(p) = &a.config {
        return experiment(p, a.no_cache, true);
    }
    let (x, y) = load_single(&a.run)?;
    let mut scores = Vec::new();
    for &seed in &a.seeds {
        let split = make_splits(x.len(), a.run.test_frac, 1, seed).map_err(config_err)?;
        let full = DatasetSplit {
            labeled: split.pool(),
            unlabeled: Vec::new(),
            test: split.test,
            iteration: 0,
        };
        let cfg = AlConfig {
            log_target: a.run.log_target,
            seed,
            ..AlConfig::new(Strategy::Random, 1)
        };
        let r = run_passive(&x, &y, &full, &cfg).context("passive fit")?;
        println!("seed {seed}: pearson {:.4}{}", r.r, if r.degenerate { " (degenerate)" } else { "" });
        scores.push(r.r);
    }
    let ms = mean_std(&scores);
    println!("pearson {:.4} ± {:.4} over {} seeds", ms.mean, ms.std, ms.n);
    Ok(())
}

fn active(a: ActiveArgs) -> Result<(), Failure> {
    if let Some(p) = &a.config {
        return experiment(p, a.no_cache, false);
    }
    let (x, y) = load_single(&a.run)?;
    let split = make_splits(x.len(), a.run.test_frac, a.l0, a.seed).map_err(config_err)?;
    let cfg = AlConfig {
        budget: a.budget,
        log_target: a.run.log_target,
        seed: a.seed,
        ..AlConfig::new(a.strategy, a.batch)
    };
    cfg.validate().map_err(config_err)?;
    let run = run_active(&x, &y, &split, &cfg).context("active run")?;
    match &a.out {
        Some(p) => {
            write(p, run.to_csv())?;
            write(&p.with_extension("json"), serde_json::to_string_pretty(&run).context("serializing run")? + "\n")?;
        }
        None => print!("{}", run.to_csv()),
    }
    match &run.error {
        Some(e) => Err(Failure::Run(anyhow!("run stopped early: {e}"))),
        None => Ok(()),
    }
}
