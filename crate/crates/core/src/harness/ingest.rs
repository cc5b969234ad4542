use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::config::LabelAggregation;
use super::HarnessError;
use crate::fa_ast::{parse_corpus, CodeGraph, ParseDepth};

/// `path,duration_ms` rows; a path may repeat once per recorded run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelsTable {
    pub rows: Vec<(String, f64)>,
}

impl LabelsTable {
    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| HarnessError::Labels(format!("{}: {e}", path.display())))?;
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| HarnessError::Labels(e.to_string()))?;
            let (Some(p), Some(d)) = (rec.get(0), rec.get(1)) else {
                return Err(HarnessError::Labels(format!("row {}: expected path,duration_ms", i + 2)));
            };
            let d: f64 = d
                .parse()
                .map_err(|_| HarnessError::Labels(format!("row {}: bad duration `{d}`", i + 2)))?;
            if !(d.is_finite() && d > 0.0) {
                return Err(HarnessError::Labels(format!("row {}: duration must be positive, got {d}", i + 2)));
            }
            rows.push((p.to_string(), d));
        }
        Ok(Self { rows })
    }

    /// One label per path, aggregated over its runs.
    pub fn aggregate(&self, how: LabelAggregation) -> BTreeMap<String, f64> {
        let mut runs: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (p, d) in &self.rows {
            runs.entry(p.clone()).or_default().push(*d);
        }
        runs.into_iter()
            .map(|(p, mut v)| {
                let label = match how {
                    LabelAggregation::Mean => v.iter().sum::<f64>() / v.len() as f64,
                    LabelAggregation::Median => {
                        v.sort_by(f64::total_cmp);
                        let m = v.len() / 2;
                        if v.len() % 2 == 1 {
                            v[m]
                        } else {
                            0.5 * (v[m - 1] + v[m])
                        }
                    }
                };
                (p, label)
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct Ingested {
    /// Graphs with labels, sorted by path.
    pub graphs: Vec<CodeGraph>,
    pub labels: Vec<f64>,
    /// Parsed sources without a label row.
    pub missing_label: Vec<String>,
    /// Label rows without a parseable source file.
    pub missing_file: Vec<String>,
    /// Sources that failed to parse, with the reason.
    pub parse_failures: Vec<(String, String)>,
}

/// Parses the corpus and joins it with the labels. Mismatches are reported
/// and dropped; an empty join is an error.
pub fn ingest(
    corpus_dir: &Path,
    labels_file: &Path,
    depth: ParseDepth,
    how: LabelAggregation,
) -> Result<Ingested, HarnessError> {
    let table = LabelsTable::read(labels_file)?;
    let labels = table.aggregate(how);
    let parsed = parse_corpus(corpus_dir, depth)?;
    join(parsed.graphs, parsed.failures.into_iter().map(|(p, e)| (p, e.to_string())).collect(), &labels)
}

pub(crate) fn join(
    graphs: Vec<CodeGraph>,
    parse_failures: Vec<(String, String)>,
    labels: &BTreeMap<String, f64>,
) -> Result<Ingested, HarnessError> {
    let parsed: BTreeSet<String> = graphs.iter().map(|g| g.path.clone()).collect();
    let missing_file: Vec<String> = labels.keys().filter(|p| !parsed.contains(*p)).cloned().collect();
    let mut missing_label = Vec::new();
    let mut kept = Vec::new();
    let mut ys = Vec::new();
    for g in graphs {
        match labels.get(&g.path) {
            Some(&y) => {
                ys.push(y);
                kept.push(g);
            }
            None => missing_label.push(g.path.clone()),
        }
    }
    for p in &missing_label {
        log::warn!("no label for {p}");
    }
    for p in &missing_file {
        log::warn!("label without parseable source: {p}");
    }
    if kept.is_empty() {
        return Err(HarnessError::EmptyIntersection);
    }
    Ok(Ingested {
        graphs: kept,
        labels: ys,
        missing_label,
        missing_file,
        parse_failures,
    })
}

/// Rows of `ids` that have a label, with those labels, in row order.
pub fn align_labels(ids: &[String], labels: &BTreeMap<String, f64>) -> Result<(Vec<usize>, Vec<f64>), HarnessError> {
    let (rows, ys): (Vec<usize>, Vec<f64>) = ids
        .iter()
        .enumerate()
        .filter_map(|(i, id)| labels.get(id).map(|&y| (i, y)))
        .unzip();
    if rows.is_empty() {
        return Err(HarnessError::EmptyIntersection);
    }
    if rows.len() < ids.len() {
        log::warn!("{} rows without a label dropped", ids.len() - rows.len());
    }
    Ok((rows, ys))
}
