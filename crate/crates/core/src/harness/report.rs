//! Markdown summary of a result directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::experiment::CurvePoint;
use super::HarnessError;

pub const NO_RUNS: &str = "no runs found";

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub embedding: String,
    pub strategy: String,
    pub points: Vec<CurvePoint>,
}

fn read_points(path: &Path) -> Result<Vec<CurvePoint>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let bad = |what: &str| HarnessError::Config(format!("{}: bad {what}", path.display()));
        pts.push(CurvePoint {
            labels_used: field(0).parse().map_err(|_| bad("labels_used"))?,
            mean: field(1).parse().map_err(|_| bad("mean"))?,
            std: field(2).parse().map_err(|_| bad("std"))?,
            n: field(3).parse().map_err(|_| bad("n"))?,
        });
    }
    Ok(pts)
}

/// Reads `aggregate/<embedding>__<strategy>.csv` files, sorted by name.
pub fn load_aggregates(result_dir: &Path) -> Result<Vec<AggregateCurve>, HarnessError> {
    let dir = result_dir.join("aggregate");
    let Ok(entries) = fs::read_dir(&dir) else {
        return Ok(Vec::new());
    };
    let mut paths: Vec<_> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let Some(stem) = p.file_stem().and_then(|s| s.to_str()).filter(|_| p.extension().is_some_and(|e| e == "csv"))
        else {
            continue;
        };
        let Some((emb, strat)) = stem.rsplit_once("__") else {
            continue;
        };
        out.push(AggregateCurve {
            embedding: emb.to_string(),
            strategy: strat.to_string(),
            points: read_points(&p)?,
        });
    }
    Ok(out)
}

/// For each embedding, the strategy with the highest mean at every budget
/// level. Ties go to the alphabetically first strategy.
pub fn best_per_budget(curves: &[AggregateCurve]) -> BTreeMap<String, Vec<(usize, String, f64)>> {
    let mut by: BTreeMap<String, BTreeMap<usize, (String, f64)>> = BTreeMap::new();
    for c in curves {
        for p in &c.points {
            let slot = by.entry(c.embedding.clone()).or_default();
            match slot.get(&p.labels_used) {
                Some((s, m)) if *m > p.mean || (*m == p.mean && *s <= c.strategy) => {}
                _ => {
                    slot.insert(p.labels_used, (c.strategy.clone(), p.mean));
                }
            }
        }
    }
    by.into_iter()
        .map(|(e, m)| (e, m.into_iter().map(|(l, (s, v))| (l, s, v)).collect()))
        .collect()
}

fn read_passive(result_dir: &Path) -> Vec<(String, f64, f64, usize)> {
    let Ok(mut r) = csv::Reader::from_path(result_dir.join("passive.csv")) else {
        return Vec::new();
    };
    r.records()
        .filter_map(Result::ok)
        .filter_map(|rec| {
            Some((
                rec.get(0)?.to_string(),
                rec.get(1)?.parse().ok()?,
                rec.get(2)?.parse().ok()?,
                rec.get(3)?.parse().ok()?,
            ))
        })
        .collect()
}

const SPLIT_SUFFIX: &str = "-split-space";

/// Human-readable markdown report for a result directory.
pub fn report(result_dir: &Path) -> Result<String, HarnessError> {
    let curves = load_aggregates(result_dir)?;
    let passive = read_passive(result_dir);
    if curves.is_empty() && passive.is_empty() {
        return Ok(format!("{NO_RUNS}\n"));
    }
    let mut s = String::from("# Experiment report\n\n");

    if !curves.is_empty() {
        s.push_str("## Final scores\n\n| Embedding | Strategy | Labels | Pearson | Runs |\n|---|---|---|---|---|\n");
        for c in &curves {
            if let Some(p) = c.points.last() {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {:.4} ± {:.4} | {} |",
                    c.embedding, c.strategy, p.labels_used, p.mean, p.std, p.n
                );
            }
        }
        s.push_str("\n## Best strategy per budget\n");
        for (emb, rows) in best_per_budget(&curves) {
            let _ = write!(s, "\n### {emb}\n\n| Labels | Strategy | Mean Pearson |\n|---|---|---|\n");
            for (l, strat, m) in rows {
                let _ = writeln!(s, "| {l} | {strat} | {m:.4} |");
            }
        }
    }

    if !passive.is_empty() {
        s.push_str("\n## Passive baseline\n\n| Embedding | Pearson | Runs |\n|---|---|---|\n");
        for (e, m, sd, n) in &passive {
            let _ = writeln!(s, "| {e} | {m:.2} ± {sd:.2} | {n} |");
        }
    }

    let mut deg = String::new();
    let passive_of = |e: &str| passive.iter().find(|p| p.0 == e).map(|p| p.1);
    let final_of = |e: &str, st: &str| {
        curves
            .iter()
            .find(|c| c.embedding == e && c.strategy == st)
            .and_then(|c| c.points.last())
            .map(|p| p.mean)
    };
    for c in &curves {
        let Some(base) = c.embedding.strip_suffix(SPLIT_SUFFIX) else {
            continue;
        };
        if let Some(full) = final_of(base, &c.strategy) {
            let split = c.points.last().map_or(f64::NAN, |p| p.mean);
            let _ = writeln!(
                deg,
                "| {base} | {} | {full:.4} | {split:.4} | {:+.4} |",
                c.strategy,
                split - full
            );
        }
    }
    for (e, m, _, _) in &passive {
        let Some(base) = e.strip_suffix(SPLIT_SUFFIX) else {
            continue;
        };
        if let Some(full) = passive_of(base) {
            let _ = writeln!(deg, "| {base} | passive | {full:.4} | {m:.4} | {:+.4} |", m - full);
        }
    }
    if !deg.is_empty() {
        s.push_str("\n## Split-space degradation\n\n| Embedding | Strategy | Full scope | Split space | Change |\n|---|---|---|---|---|\n");
        s.push_str(&deg);
    }
    Ok(s)
}
