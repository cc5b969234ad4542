//! End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion.
//!
//! Criterion 9 needs a real corpus: set `PERFAL_ACCEPT_CORPUS` to the source
//! directory and `PERFAL_ACCEPT_LABELS` to its `path,duration_ms` file.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use perfal::al::{
    bootstrap_indices, qbc_from_resamples, select_coreset, select_random, select_variance, AlRun, LabelOracle, Strategy,
};
use perfal::embed::{EmbeddingConfig, Method};
use perfal::fa_ast::{build_vocabulary, parse_corpus, EdgeKind, ParseDepth};
use perfal::gpr::{FitOptions, GprModel, MaternKernel};
use perfal::graph::{manual_embed, MetricVector};
use perfal::harness::{gen_synthetic, run_experiment, ExperimentConfig, LabelAggregation, RunOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::al::*;
use common::fixtures::*;
use common::gpr::*;
use common::*;

enum Verdict {
    Pass,
    Fail,
    Skip,
}

struct Line {
    id: u8,
    verdict: Verdict,
    detail: String,
}

fn check(id: u8, ok: bool, detail: String) -> Line {
    Line {
        id,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

fn graph_metrics() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = random_small_digraph(&mut rng);
        let got = MetricVector::compute(&g).to_vec();
        for (a, b) in got.iter().zip(metric_oracle(&g)) {
            worst = worst.max((a - b).abs());
        }
    }
    let t = start.elapsed();
    check(
        1,
        worst <= 1e-9 && t < Duration::from_secs(30),
        format!("max slot error {worst:.1e} (tol 1e-9), {:.2}s (limit 30s)", t.as_secs_f64()),
    )
}

fn fa_ast_structure() -> Line {
    let rows = expected_counts();
    let mut mismatches = 0;
    let (mut ifs, mut if_flows) = (0, 0);
    for (file, want) in &rows {
        let g = load(file);
        let got = g.edge_kind_counts();
        mismatches += EdgeKind::ALL.iter().filter(|k| got[k.index()] != want[k.as_str()]).count();
        ifs += g.nodes.iter().filter(|n| n.kind == "IfStatement").count();
        if_flows += g.count_kind(EdgeKind::IfFlow);
    }
    let g = load("WeatherAPITest.java");
    let ty = find_terminal(&g, "TypeIdentifier", "WeatherAPI")[0];
    let api = find_terminal(&g, "Identifier", "api")[0];
    let type_then_name = has_edge(&g, ty, api, EdgeKind::NextToken);
    let freeze = find_terminal(&g, "MemberReference", "Flags.FREEZE")[0];
    let f = find_terminal(&g, "Identifier", "f").into_iter().find(|&i| i > freeze).unwrap();
    let dual = has_edge(&g, freeze, f, EdgeKind::NextToken) && has_edge(&g, freeze, f, EdgeKind::NextSibling);
    check(
        2,
        rows.len() == 25 && mismatches == 0 && type_then_name && dual && ifs == if_flows,
        format!(
            "{} files, {mismatches} count mismatches, WeatherAPI->api {type_then_name}, \
             Flags.FREEZE->f token+sibling {dual}, {if_flows} IfFlow for {ifs} if",
            rows.len()
        ),
    )
}

fn tree_sim_bounds() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut bad = Vec::new();
    for _ in 0..100 {
        let n = rng.gen_range(3..=50);
        let t = MetricVector::compute(&random_tree(n, &mut rng)).tree_sim;
        let k = MetricVector::compute(&complete(n)).tree_sim;
        if t != 0.0 || k != 1.0 {
            bad.push(format!("n={n}: tree {t}, complete {k}"));
        }
    }
    check(3, bad.is_empty(), format!("100 sizes in [3, 50], exact; failures {bad:?}"))
}

fn gpr_correctness() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut worst_mean = 0.0f64;
    let mut worst_var = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let x = spaced_points(&mut rng, n, 0.05);
        let y: Vec<f64> = x.iter().map(|v| v.sin() + rng.gen_range(-0.3..0.3)).collect();
        let noise = rng.gen_range(1e-3..0.5);
        let k = random_kernel(&mut rng, noise);
        let m = GprModel::fit(&rows(&x), &y, &fixed(k)).unwrap();
        let q: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..11.0)).collect();
        let (mean, var) = m.predict(&rows(&q)).unwrap();
        let (om, ov) = dense_posterior(&k, noise + m.jitter(), &x, &y, &q);
        for i in 0..q.len() {
            worst_mean = worst_mean.max((mean[i] - om[i]).abs());
            worst_var = worst_var.max((var[i] - ov[i].max(0.0)).abs());
        }
    }
    let mut worst_interp = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let x = spaced_points(&mut rng, n, 0.5);
        let y: Vec<f64> = x.iter().map(|v| v.cos() * 3.0 + rng.gen_range(-1.0..1.0)).collect();
        let k = MaternKernel {
            length_scale: rng.gen_range(0.3..1.5),
            ..random_kernel(&mut rng, 0.0)
        };
        let m = GprModel::fit(&rows(&x), &y, &fixed(k)).unwrap();
        for (p, t) in m.predict_mean(&rows(&x)).unwrap().iter().zip(&y) {
            worst_interp = worst_interp.max((p - t).abs());
        }
    }
    let mut rises = 0;
    for _ in 0..500 {
        let n = rng.gen_range(2..=9);
        let x = spaced_points(&mut rng, n + 1, 0.2);
        let y: Vec<f64> = x.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
        let k = random_kernel(&mut rng, 0.0);
        let q: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..11.0)).collect();
        let (_, vb) = GprModel::fit(&rows(&x[..n]), &y[..n], &fixed(k)).unwrap().predict(&rows(&q)).unwrap();
        let (_, va) = GprModel::fit(&rows(&x), &y, &fixed(k)).unwrap().predict(&rows(&q)).unwrap();
        if va.iter().zip(&vb).any(|(a, b)| *a > b + 1e-12) {
            rises += 1;
        }
    }
    check(
        4,
        worst_mean < 1e-8 && worst_var < 1e-8 && worst_interp < 1e-6 && rises == 0,
        format!(
            "mean err {worst_mean:.1e}, var err {worst_var:.1e} (tol 1e-8); \
             interpolation err {worst_interp:.1e} (tol 1e-6); variance rose in {rises}/500 trials"
        ),
    )
}

fn query_strategies() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let mut coreset_bad = 0;
    let mut radius_bad = 0;
    for _ in 0..300 {
        let n_u = rng.gen_range(1..=12);
        let n_l = rng.gen_range(0..=4);
        let dim = rng.gen_range(1..=3);
        let x = random_points(&mut rng, n_u + n_l, dim);
        let (labeled, unlabeled) = random_split(&mut rng, n_u + n_l, n_l);
        let b = rng.gen_range(1..=unlabeled.len().min(4));
        let got = select_coreset(&x, &labeled, &unlabeled, b);
        if got != coreset_from_scratch(&x, &labeled, &unlabeled, b) {
            coreset_bad += 1;
        }
        let mut centers = labeled.clone();
        centers.extend(&got);
        if cover_radius(&x, &centers, &unlabeled) > 2.0 * optimal_radius(&x, &labeled, &unlabeled, b) + 1e-12 {
            radius_bad += 1;
        }
    }

    let mut variance_bad = 0;
    let mut qbc_bad = 0;
    let mut qbc_cases = 0;
    for case in 0..60 {
        let n = rng.gen_range(10..30);
        let x = random_points(&mut rng, n, 2);
        let y: Vec<f64> = x.iter().map(|r| r[0].sin() + r[1] + 10.0).collect();
        let (labeled, unlabeled) = random_split(&mut rng, n, n / 2);
        if labeled.len() < 3 {
            continue;
        }
        let kernel = MaternKernel {
            length_scale: rng.gen_range(0.5..3.0),
            ..MaternKernel::default()
        };
        let xl: Vec<Vec<f64>> = labeled.iter().map(|&i| x[i].clone()).collect();
        let yl: Vec<f64> = labeled.iter().map(|&i| y[i]).collect();
        let opts = FitOptions {
            tune: false,
            kernel,
            ..FitOptions::default()
        };
        let model = GprModel::fit(&xl, &yl, &opts).unwrap();
        let b = rng.gen_range(1..=unlabeled.len());

        let q: Vec<Vec<f64>> = unlabeled.iter().map(|&u| x[u].clone()).collect();
        let (_, var) = model.predict(&q).unwrap();
        if select_variance(&model, &x, &unlabeled, b).unwrap() != top_b_by_sort(&unlabeled, &var, b) {
            variance_bad += 1;
        }

        qbc_cases += 1;
        let oracle = LabelOracle::new(y.clone(), &[]);
        let resamples = bootstrap_indices(labeled.len(), 10, case);
        let out = qbc_from_resamples(&model, &x, &oracle, &labeled, &unlabeled, b, &resamples).unwrap();
        let want = pairwise_variance(&naive_member_means(&kernel, &x, &y, &labeled, &unlabeled, &resamples));
        let close = out
            .disagreement
            .iter()
            .zip(&want)
            .all(|(a, w)| (a - w).abs() <= 1e-9 * w.abs().max(1.0));
        if !close || out.batch != top_b_by_sort(&unlabeled, &want, b) {
            qbc_bad += 1;
        }
    }

    let pool: Vec<usize> = (0..20).collect();
    let (draws, b) = (10_000u64, 5usize);
    let mut counts = vec![0usize; pool.len()];
    for seed in 0..draws {
        for id in select_random(&pool, b, seed) {
            counts[id] += 1;
        }
    }
    let p = b as f64 / pool.len() as f64;
    let mean = draws as f64 * p;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    let worst_z = counts.iter().map(|&c| (c as f64 - mean).abs() / sd).fold(0.0, f64::max);

    check(
        5,
        coreset_bad == 0 && radius_bad == 0 && variance_bad == 0 && qbc_bad == 0 && worst_z <= 3.0,
        format!(
            "coreset mismatches {coreset_bad}/300, radius > 2x optimum {radius_bad}, \
             variance mismatches {variance_bad}, qbc mismatches {qbc_bad}/{qbc_cases}, \
             random max |z| {worst_z:.2} over 10k draws (limit 3)"
        ),
    )
}

fn synthetic_config(corpus: &Path, labels: &Path, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        corpus_dir: corpus.to_path_buf(),
        labels_file: labels.to_path_buf(),
        parse_depth: ParseDepth::File,
        embeddings: vec![EmbeddingConfig::new(Method::Graph2vec), EmbeddingConfig::new(Method::Manual)],
        strategies: vec![Strategy::Random, Strategy::Variance, Strategy::Coreset, Strategy::Qbc],
        l0_size: 30,
        batch_size: 20,
        // half of the 240-file pool, so strategies still differ at the end
        budget: Some(130),
        test_frac: 0.2,
        seeds: (0..15).collect(),
        output_dir: out.to_path_buf(),
        label_aggregation: LabelAggregation::Mean,
        committee: 10,
        nu: Default::default(),
        restarts: 5,
        max_evals: 60,
        log_target: false,
    }
}

fn files_under(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let Ok(entries) = fs::read_dir(dir) else { return out };
    for e in entries.flatten() {
        let p = e.path();
        if p.is_dir() {
            out.extend(files_under(&p, ext));
        } else if p.extension().is_some_and(|x| x == ext) {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn al_invariants(out: &Path, n: usize, batch: usize) -> Line {
    let mut runs = 0;
    let mut reads = 0;
    let mut problems = Vec::new();
    for f in files_under(&out.join("runs"), "json") {
        let run: AlRun = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
        runs += 1;
        reads += run.test_label_reads_during_query;
        let name = f.strip_prefix(out).unwrap().display().to_string();
        if run.error.is_some() {
            problems.push(format!("{name}: run failed"));
            continue;
        }
        if !run.initial.is_partition_of(n) {
            problems.push(format!("{name}: initial split is not a partition"));
        }
        let mut labeled: BTreeSet<usize> = run.initial.labeled.iter().copied().collect();
        let mut unlabeled: BTreeSet<usize> = run.initial.unlabeled.iter().copied().collect();
        let test: BTreeSet<usize> = run.initial.test.iter().copied().collect();
        let last = run.records.len() - 1;
        for (i, rec) in run.records.iter().enumerate() {
            if rec.labels_used != labeled.len() {
                problems.push(format!("{name} iter {i}: labels_used {} vs |L| {}", rec.labels_used, labeled.len()));
            }
            if i < last && rec.queried.len() != batch {
                problems.push(format!("{name} iter {i}: batch of {}", rec.queried.len()));
            }
            for q in &rec.queried {
                if !unlabeled.remove(q) || !labeled.insert(*q) || test.contains(q) {
                    problems.push(format!("{name} iter {i}: id {q} broke L/U/test disjointness"));
                }
            }
        }
    }
    check(
        6,
        runs > 0 && reads == 0 && problems.is_empty(),
        format!(
            "{runs} runs, test-label reads during querying {reads}, |L| grows by {batch}, \
             disjointness violations {}{}",
            problems.len(),
            problems.first().map(|p| format!(" (first: {p})")).unwrap_or_default()
        ),
    )
}

fn read_table(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn final_mean(out: &Path, emb: &str, strategy: &str) -> f64 {
    let rows = read_table(&out.join("aggregate").join(format!("{emb}__{strategy}.csv")));
    rows.last().unwrap()[1].parse().unwrap()
}

fn synthetic_reproduction(out: &Path, elapsed: Duration) -> Line {
    let passive: BTreeMap<String, f64> = read_table(&out.join("passive.csv"))
        .into_iter()
        .map(|r| (r[0].clone(), r[1].parse().unwrap()))
        .collect();
    let (g2v, manual) = (passive["graph2vec"], passive["manual"]);
    let a = g2v >= manual - 0.05;

    let mut b = true;
    let mut c = true;
    let mut finals = String::new();
    for emb in ["graph2vec", "manual"] {
        let random = final_mean(out, emb, "random");
        for s in ["random", "variance", "coreset", "qbc"] {
            let m = final_mean(out, emb, s);
            b &= m >= random - 0.03;
            c &= m >= 0.6;
            finals.push_str(&format!(" {emb}/{s} {m:.3}"));
        }
    }
    let fast = elapsed < Duration::from_secs(20 * 60);
    check(
        7,
        a && b && c && fast,
        format!(
            "(a) passive graph2vec {g2v:.3} vs manual {manual:.3} (margin -0.05) {a}; \
             (b) adaptive >= random - 0.03 {b}; (c) finals >= 0.6 {c}:{finals}; {:.0}s (limit 1200s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn byte_identical(first: &Path, second: &Path) -> Line {
    let a = files_under(first, "csv");
    let b = files_under(second, "csv");
    let rel = |v: &[PathBuf], root: &Path| -> Vec<PathBuf> {
        v.iter().map(|p| p.strip_prefix(root).unwrap().to_path_buf()).collect()
    };
    let same_set = rel(&a, first) == rel(&b, second);
    let differing: Vec<String> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| fs::read(x).unwrap() != fs::read(y).unwrap())
        .map(|(x, _)| x.strip_prefix(first).unwrap().display().to_string())
        .collect();
    check(
        8,
        same_set && !a.is_empty() && differing.is_empty(),
        format!("{} CSVs compared, same file set {same_set}, differing {differing:?}", a.len()),
    )
}

fn within(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want
}

fn real_corpus() -> Line {
    let (Ok(dir), Ok(labels)) = (std::env::var("PERFAL_ACCEPT_CORPUS"), std::env::var("PERFAL_ACCEPT_LABELS")) else {
        return Line {
            id: 9,
            verdict: Verdict::Skip,
            detail: "set PERFAL_ACCEPT_CORPUS and PERFAL_ACCEPT_LABELS to run".into(),
        };
    };
    let corpus = parse_corpus(Path::new(&dir), ParseDepth::File).unwrap();
    let files = corpus.graphs.len();
    let nodes: usize = corpus.graphs.iter().map(|g| g.node_count()).sum();
    let vocab = build_vocabulary(&corpus.graphs).size();
    let avg_nodes = nodes as f64 / files as f64;
    let avg_diameter = corpus.graphs.iter().map(|g| manual_embed(g).diameter).sum::<f64>() / files as f64;
    let stats_ok = files == 922
        && within(nodes as f64, 806_580.0, 0.05)
        && within(vocab as f64, 36_387.0, 0.05)
        && within(avg_nodes, 875.0, 0.05)
        && within(avg_diameter, 14.0, 0.05);

    let out = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        embeddings: vec![EmbeddingConfig::new(Method::Graph2vec)],
        strategies: vec![],
        ..synthetic_config(Path::new(&dir), Path::new(&labels), out.path())
    };
    run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();
    let g2v: f64 = read_table(&out.path().join("passive.csv"))[0][1].parse().unwrap();
    let pearson_ok = (g2v - 0.73).abs() <= 0.10;
    check(
        9,
        stats_ok && pearson_ok,
        format!(
            "{files} files (922), {nodes} nodes (806580 ±5%), vocab {vocab} (36387 ±5%), \
             avg |V| {avg_nodes:.0} (875 ±5%), avg diameter {avg_diameter:.1} (14 ±5%), \
             graph2vec passive {g2v:.3} (0.73 ±0.10)"
        ),
    )
}

#[test]
fn acceptance() {
    let mut lines = vec![graph_metrics(), fa_ast_structure(), tree_sim_bounds(), gpr_correctness(), query_strategies()];

    let work = tempfile::tempdir().unwrap();
    let corpus = gen_synthetic(300, 0, &work.path().join("corpus")).unwrap();
    let first = work.path().join("first");
    let cfg = synthetic_config(&corpus.source_dir, &corpus.labels_file, &first);
    let start = Instant::now();
    let summary = run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();
    let elapsed = start.elapsed();
    assert!(summary.all_ok(), "{:?}", summary.failed_cells);
    lines.push(al_invariants(&first, summary.graphs, cfg.batch_size));
    lines.push(synthetic_reproduction(&first, elapsed));

    let second = work.path().join("second");
    let again = ExperimentConfig {
        output_dir: second.clone(),
        ..cfg.clone()
    };
    run_experiment(&again, RunOptions { use_cache: false }).unwrap();
    lines.push(byte_identical(&first, &second));
    lines.push(real_corpus());

    let mut failed = Vec::new();
    for l in &lines {
        let tag = match l.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failed.push(l.id);
                "FAIL"
            }
            Verdict::Skip => "SKIP",
        };
        println!("criterion {} {tag}: {}", l.id, l.detail);
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
