//! Dataset loading and per-model explanation statistics.

use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{enumerate_xps, Enumeration};
use crate::explain::XpKind;
use crate::model::{DecisionGraph, Instance, ModelError};
use crate::xpg::{Xpg, XpgError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no instances")]
    NoInstances,
    #[error("dataset schema mismatch: {0}")]
    Schema(String),
    #[error("row {row}: {source}")]
    Row { row: usize, source: ModelError },
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Xpg(#[from] XpgError),
}

/// Reads instances from a CSV file whose header names the model's features
/// (in any order), or from a JSON array of rows listing values in feature
/// order.
pub fn load_dataset(dg: &DecisionGraph, path: &Path) -> Result<Vec<Instance>, BenchError> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    if is_json {
        parse_json_rows(dg, &text)
    } else {
        parse_csv_rows(dg, &text)
    }
}

pub fn parse_csv_rows(dg: &DecisionGraph, text: &str) -> Result<Vec<Instance>, BenchError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| BenchError::Schema(e.to_string()))?
        .clone();
    let columns: Vec<usize> = dg
        .features()
        .iter()
        .map(|f| {
            header
                .iter()
                .position(|h| h == f.name)
                .ok_or_else(|| BenchError::Schema(format!("missing column {}", f.name)))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BenchError::Schema(e.to_string()))?;
        let fields: Vec<&str> = columns
            .iter()
            .map(|&c| record.get(c).unwrap_or(""))
            .collect();
        rows.push(Instance::parse(dg, &fields).map_err(|source| BenchError::Row { row: k + 1, source })?);
    }
    Ok(rows)
}

pub fn parse_json_rows(dg: &DecisionGraph, text: &str) -> Result<Vec<Instance>, BenchError> {
    let rows: Vec<Vec<serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| BenchError::Schema(e.to_string()))?;
    rows.iter()
        .enumerate()
        .map(|(k, row)| {
            let fields: Vec<String> = row
                .iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            Instance::parse(dg, &fields).map_err(|source| BenchError::Row { row: k + 1, source })
        })
        .collect()
}

/// Drops repeated rows, keeping first occurrences.
pub fn dedup_instances(rows: Vec<Instance>) -> Vec<Instance> {
    let mut seen = HashSet::new();
    rows.into_iter()
        .filter(|v| seen.insert(format!("{:?}", v.values)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KindStats {
    /// Most explanations of this kind for one instance.
    pub max: usize,
    pub min: usize,
    pub avg: f64,
    /// Mean explanation length as a percentage of the feature count.
    pub avg_len_pct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeStats {
    pub total: f64,
    pub max: f64,
    pub min: f64,
    pub avg: f64,
}

/// One row of the statistics table. Times are in seconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub features: usize,
    pub instances: usize,
    pub nodes: usize,
    pub avg_xps: f64,
    pub axp: KindStats,
    pub cxp: KindStats,
    pub time: TimeStats,
}

fn kind_stats(runs: &[Enumeration], kind: XpKind, m: usize) -> KindStats {
    let counts: Vec<usize> = runs.iter().map(|r| r.of_kind(kind).count()).collect();
    let lengths: Vec<usize> = runs
        .iter()
        .flat_map(|r| r.of_kind(kind).map(|s| s.len()))
        .collect();
    let avg_len = if lengths.is_empty() {
        0.0
    } else {
        lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
    };
    KindStats {
        max: counts.iter().copied().max().unwrap_or(0),
        min: counts.iter().copied().min().unwrap_or(0),
        avg: counts.iter().sum::<usize>() as f64 / counts.len().max(1) as f64,
        avg_len_pct: if m == 0 { 0.0 } else { 100.0 * avg_len / m as f64 },
    }
}

/// Enumerates every explanation of every distinct instance and summarizes.
pub fn bench(dg: &DecisionGraph, instances: &[Instance]) -> Result<BenchRow, BenchError> {
    let rows = dedup_instances(instances.to_vec());
    if rows.is_empty() {
        return Err(BenchError::NoInstances);
    }
    let runs: Vec<Enumeration> = rows
        .iter()
        .map(|v| Xpg::build(dg, v).map(|x| enumerate_xps(&x)))
        .collect::<Result<_, _>>()?;
    Ok(summarize(dg, &runs))
}

pub fn summarize(dg: &DecisionGraph, runs: &[Enumeration]) -> BenchRow {
    let m = dg.num_features();
    let times: Vec<f64> = runs.iter().map(|r| r.elapsed.as_secs_f64()).collect();
    let total: f64 = times.iter().sum();
    BenchRow {
        features: m,
        instances: runs.len(),
        nodes: dg.nodes().len(),
        avg_xps: runs.iter().map(Enumeration::len).sum::<usize>() as f64 / runs.len().max(1) as f64,
        axp: kind_stats(runs, XpKind::AXp, m),
        cxp: kind_stats(runs, XpKind::CXp, m),
        time: TimeStats {
            total,
            max: times.iter().copied().fold(0.0, f64::max),
            min: times.iter().copied().reduce(f64::min).unwrap_or(0.0),
            avg: total / times.len().max(1) as f64,
        },
    }
}

impl BenchRow {
    pub const HEADER: [&'static str; 16] = [
        "m", "inst", "nodes", "XPs", "AXp.Mx", "AXp.m", "AXp.avg", "AXp.%L", "CXp.Mx", "CXp.m",
        "CXp.avg", "CXp.%L", "Tot", "Mx", "m", "avg",
    ];

    /// Cells in [`HEADER`](Self::HEADER) order.
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.features.to_string(),
            self.instances.to_string(),
            self.nodes.to_string(),
            format!("{:.2}", self.avg_xps),
            self.axp.max.to_string(),
            self.axp.min.to_string(),
            format!("{:.2}", self.axp.avg),
            format!("{:.1}", self.axp.avg_len_pct),
            self.cxp.max.to_string(),
            self.cxp.min.to_string(),
            format!("{:.2}", self.cxp.avg),
            format!("{:.1}", self.cxp.avg_len_pct),
            format!("{:.4}", self.time.total),
            format!("{:.4}", self.time.max),
            format!("{:.4}", self.time.min),
            format!("{:.4}", self.time.avg),
        ]
    }
}
