use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use perfal::al::Strategy;
use perfal::embed::{EmbeddingConfig, Method};
use perfal::harness::{
    best_per_budget, gen_synthetic, ingest, load_aggregates, report, run_experiment, AggregateCurve, CurvePoint,
    ExperimentConfig, HarnessError, LabelAggregation, LabelsTable, RunOptions,
};
use perfal::fa_ast::ParseDepth;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(corpus: &Path, labels: &Path, out: &Path, strategies: Vec<Strategy>, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        corpus_dir: corpus.to_path_buf(),
        labels_file: labels.to_path_buf(),
        parse_depth: ParseDepth::File,
        embeddings: vec![EmbeddingConfig::new(Method::Manual)],
        strategies,
        l0_size: 10,
        batch_size: 5,
        budget: Some(25),
        test_frac: 0.2,
        seeds,
        output_dir: out.to_path_buf(),
        label_aggregation: LabelAggregation::Mean,
        committee: 5,
        nu: Default::default(),
        restarts: 1,
        max_evals: 30,
        log_target: false,
    }
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let Ok(entries) = fs::read_dir(dir) else { return out };
    for e in entries.flatten() {
        let p = e.path();
        if p.is_dir() {
            out.extend(files_with_ext(&p, ext));
        } else if p.extension().is_some_and(|x| x == ext) {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn one_cell_two_seeds_writes_the_expected_files() {
    let d = tempfile::tempdir().unwrap();
    let c = gen_synthetic(40, 1, &d.path().join("corpus")).unwrap();
    let out = d.path().join("out");
    let cfg = config(&c.source_dir, &c.labels_file, &out, vec![Strategy::Random], vec![0, 1]);
    let s = run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();
    assert!(s.all_ok(), "{:?}", s.failed_cells);
    assert_eq!(s.graphs, 40);

    assert_eq!(files_with_ext(&out.join("runs"), "csv").len(), 2);
    assert_eq!(files_with_ext(&out.join("aggregate"), "csv").len(), 1);
    assert_eq!(files_with_ext(&out.join("plots"), "svg").len(), 2);
    assert!(out.join("config.json").is_file());
    assert!(out.join("summary.json").is_file());
    let snap = ExperimentConfig::from_json_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(snap, cfg);
}

#[test]
fn aggregate_is_the_mean_of_the_run_csvs() {
    let d = tempfile::tempdir().unwrap();
    let c = gen_synthetic(40, 2, &d.path().join("corpus")).unwrap();
    let out = d.path().join("out");
    let cfg = config(&c.source_dir, &c.labels_file, &out, vec![Strategy::Coreset], vec![3, 4, 5]);
    run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();

    let mut at: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for f in files_with_ext(&out.join("runs"), "csv") {
        for row in read_rows(&f) {
            at.entry(row[1].parse().unwrap()).or_default().push(row[2].parse().unwrap());
        }
    }
    let agg = read_rows(&out.join("aggregate").join("manual__coreset.csv"));
    assert_eq!(agg.len(), at.len());
    for (row, (labels, v)) in agg.iter().zip(&at) {
        assert_eq!(row[0].parse::<usize>().unwrap(), *labels);
        let k = v.len() as f64;
        let mean = v.iter().sum::<f64>() / k;
        let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        assert!((row[1].parse::<f64>().unwrap() - mean).abs() < 1e-12);
        assert!((row[2].parse::<f64>().unwrap() - std).abs() < 1e-12);
        assert_eq!(row[3].parse::<usize>().unwrap(), v.len());
    }
}

#[test]
fn single_run_report_shows_its_final_row() {
    let d = tempfile::tempdir().unwrap();
    let c = gen_synthetic(30, 3, &d.path().join("corpus")).unwrap();
    let out = d.path().join("out");
    let cfg = config(&c.source_dir, &c.labels_file, &out, vec![Strategy::Variance], vec![9]);
    run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();
    let run = read_rows(&out.join("runs/manual/variance/seed-9.csv"));
    let last = run.last().unwrap();
    let r: f64 = last[2].parse().unwrap();
    let text = report(&out).unwrap();
    let want = format!("| manual | variance | {} | {r:.4} ± 0.0000 | 1 |", last[1]);
    assert!(text.contains(&want), "missing {want:?} in\n{text}");
}

#[test]
fn best_strategy_matches_a_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let strategies = ["coreset", "qbc", "random", "variance"];
    for _ in 0..50 {
        let mut curves = Vec::new();
        for emb in ["graph2vec", "manual"] {
            for s in strategies {
                if rng.gen_bool(0.2) {
                    continue;
                }
                let points = (1..=rng.gen_range(1..6))
                    .map(|i| CurvePoint {
                        labels_used: i * 10,
                        // coarse values so ties happen
                        mean: rng.gen_range(0..5) as f64 / 4.0,
                        std: 0.0,
                        n: 1,
                    })
                    .collect();
                curves.push(AggregateCurve {
                    embedding: emb.into(),
                    strategy: s.into(),
                    points,
                });
            }
        }
        let mut rows: Vec<(String, usize, f64, String)> = Vec::new();
        for c in &curves {
            for p in &c.points {
                rows.push((c.embedding.clone(), p.labels_used, p.mean, c.strategy.clone()));
            }
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(b.2.total_cmp(&a.2)).then(a.3.cmp(&b.3)));
        let mut want: BTreeMap<String, Vec<(usize, String, f64)>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (e, l, m, s) in rows {
            if seen.insert((e.clone(), l)) {
                want.entry(e).or_default().push((l, s, m));
            }
        }
        assert_eq!(best_per_budget(&curves), want);
    }
}

#[test]
fn report_reads_back_the_aggregates() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(report(d.path()).unwrap(), "no runs found\n");
    let c = gen_synthetic(30, 4, &d.path().join("corpus")).unwrap();
    let out = d.path().join("out");
    let cfg = config(&c.source_dir, &c.labels_file, &out, vec![Strategy::Random, Strategy::Qbc], vec![0, 1]);
    run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();
    let curves = load_aggregates(&out).unwrap();
    let names: Vec<(&str, &str)> = curves.iter().map(|c| (c.embedding.as_str(), c.strategy.as_str())).collect();
    assert_eq!(names, [("manual", "qbc"), ("manual", "random")]);
}

#[test]
fn kept_files_are_the_labeled_parseable_ones() {
    let d = tempfile::tempdir().unwrap();
    let c = gen_synthetic(30, 5, &d.path().join("corpus")).unwrap();
    let src = &c.source_dir;
    fs::write(src.join("synth/Broken.java"), ")))").unwrap();
    fs::write(src.join("synth/Unlabeled.java"), "class Unlabeled { void f() {} }").unwrap();
    fs::remove_file(src.join(&c.files[3].path)).unwrap();
    let mut labels = fs::read_to_string(&c.labels_file).unwrap();
    labels.push_str("synth/Broken.java,12\nsynth/Ghost.java,7\n");
    let dropped = &c.files[7].path;
    let labels: String = labels.lines().filter(|l| !l.starts_with(dropped.as_str())).map(|l| format!("{l}\n")).collect();
    fs::write(&c.labels_file, labels).unwrap();

    let table = LabelsTable::read(&c.labels_file).unwrap();
    let labeled: BTreeSet<String> = table.rows.iter().map(|r| r.0.clone()).collect();
    let parseable: BTreeSet<String> = c
        .files
        .iter()
        .map(|f| f.path.clone())
        .filter(|p| src.join(p).exists())
        .chain(["synth/Unlabeled.java".to_string()])
        .collect();

    let ing = ingest(src, &c.labels_file, ParseDepth::File, LabelAggregation::Mean).unwrap();
    let kept: BTreeSet<String> = ing.graphs.iter().map(|g| g.path.clone()).collect();
    assert_eq!(kept, &labeled & &parseable);
    assert_eq!(ing.graphs.len(), 28);
    let mut unlabeled = vec![dropped.clone(), "synth/Unlabeled.java".to_string()];
    unlabeled.sort();
    assert_eq!(ing.missing_label, unlabeled);
    assert_eq!(ing.missing_file.len(), 3);
    assert_eq!(ing.parse_failures.len(), 1);
}

#[test]
fn repeated_rows_are_averaged_and_disjoint_inputs_fail() {
    let d = tempfile::tempdir().unwrap();
    let src = d.path().join("src");
    fs::create_dir_all(&src).unwrap();
    fs::write(src.join("A.java"), "class A { void f() { int x = 1; } }").unwrap();
    let labels = d.path().join("labels.csv");
    fs::write(&labels, "path,duration_ms\nA.java,10\nA.java,20\nA.java,30\n").unwrap();
    let ing = ingest(&src, &labels, ParseDepth::File, LabelAggregation::Mean).unwrap();
    assert_eq!(ing.labels, [20.0]);

    fs::write(&labels, "path,duration_ms\nB.java,10\n").unwrap();
    let err = ingest(&src, &labels, ParseDepth::File, LabelAggregation::Mean).unwrap_err();
    assert!(matches!(err, HarnessError::EmptyIntersection), "{err:?}");
}

#[test]
fn manual_embedding_recovers_the_synthetic_signal() {
    let d = tempfile::tempdir().unwrap();
    let c = gen_synthetic(150, 6, &d.path().join("corpus")).unwrap();
    let out = d.path().join("out");
    let cfg = config(&c.source_dir, &c.labels_file, &out, vec![], vec![0, 1, 2]);
    let s = run_experiment(&cfg, RunOptions { use_cache: false }).unwrap();
    assert!(s.all_ok(), "{:?}", s.failed_cells);
    let rows = read_rows(&out.join("passive.csv"));
    assert_eq!(rows[0][0], "manual");
    let mean: f64 = rows[0][1].parse().unwrap();
    assert!(mean > 0.5, "manual passive Pearson {mean}");
}
