//! Graph features from non-computable basis elements.
//!
//! The basis elements a model cannot compute are evaluated on every graph of a
//! dataset, node-valued ones as per-node columns and edge-valued ones as
//! per-pair slices. Values are exact integer counts.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contraction::{noncomputable_table, Model};
use crate::error::{Error, Result};
use crate::eval::{eval_p, GraphData, DEFAULT_ORDER_CAP};
use crate::multigraph::{parse_signature, MultiGraphH, OutputKind};
use crate::par;

/// Largest graph accepted by the feature pipeline (edge features are dense).
pub const MAX_FEATURE_NODES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub graphs: Vec<(String, GraphData)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Dataset {
    /// Validates ids (unique) and graphs (simple, at most [`MAX_FEATURE_NODES`] nodes).
    pub fn new(graphs: Vec<(String, GraphData)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (id, g) in &graphs {
            let fail = |reason: String| Error::Dataset { id: id.clone(), reason };
            if !seen.insert(id.as_str()) {
                return Err(fail("duplicate id".into()));
            }
            if g.n() > MAX_FEATURE_NODES {
                return Err(fail(format!("{} nodes exceeds the limit of {MAX_FEATURE_NODES}", g.n())));
            }
            if GraphData::simple(g.n(), g.values().to_vec()).is_err() {
                return Err(fail("graph is not simple".into()));
            }
        }
        Ok(Self { graphs })
    }

    /// Parse JSON lines: `{"id": "...", "n": 5, "edges": [[0, 1], ...]}`.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut graphs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(line).map_err(|e| Error::Dataset {
                id: format!("line {}", lineno + 1),
                reason: e.to_string(),
            })?;
            if rec.n > MAX_FEATURE_NODES {
                return Err(Error::Dataset {
                    id: rec.id,
                    reason: format!("{} nodes exceeds the limit of {MAX_FEATURE_NODES}", rec.n),
                });
            }
            let g = GraphData::from_edges(rec.n, &rec.edges).map_err(|e| Error::Dataset {
                id: rec.id.clone(),
                reason: e.to_string(),
            })?;
            graphs.push((rec.id, g));
        }
        Self::new(graphs)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (id, g) in &self.graphs {
            let n = g.n();
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| g.get(i, j) != 0.0)
                .collect();
            let line = serde_json::json!({ "id": id, "n": n, "edges": edges });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path)?;
    let mut text = String::new();
    for line in BufReader::new(file).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    Dataset::from_jsonl(&text)
}

/// Non-computable simple connected basis elements for `model`, in degree then
/// signature order.
pub fn discover_features(model: Model, min_degree: usize, max_degree: usize) -> Result<Vec<MultiGraphH>> {
    let rows = noncomputable_table(model, min_degree, max_degree)?;
    rows.iter()
        .flat_map(|r| &r.signatures)
        .map(|s| Ok(parse_signature(s, true)?.canonicalize().0))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFeatures {
    /// `node[i][k]`: column `k` at node `i`.
    pub node: Vec<Vec<i64>>,
    /// `edge[i][j][k]`: slice `k` at pair `(i, j)`.
    pub edge: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Columns {
    pub node: Vec<String>,
    pub edge: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub model: Model,
    pub degrees: Vec<usize>,
    pub columns: Columns,
    pub graphs: BTreeMap<String, GraphFeatures>,
}

fn graph_features(g: &GraphData, node_hs: &[MultiGraphH], edge_hs: &[MultiGraphH]) -> Result<GraphFeatures> {
    let n = g.n();
    let mut node = vec![vec![0i64; node_hs.len()]; n];
    let mut edge = vec![vec![vec![0i64; edge_hs.len()]; n]; n];
    if n == 0 {
        return Ok(GraphFeatures { node, edge });
    }
    for (k, h) in node_hs.iter().enumerate() {
        let t = eval_p::<i64>(h, g, DEFAULT_ORDER_CAP)?;
        for (i, row) in node.iter_mut().enumerate() {
            row[k] = t.data[i];
        }
    }
    for (k, h) in edge_hs.iter().enumerate() {
        let t = eval_p::<i64>(h, g, DEFAULT_ORDER_CAP)?;
        for (i, rows) in edge.iter_mut().enumerate() {
            for (j, cell) in rows.iter_mut().enumerate() {
                cell[k] = t.data[i * n + j];
            }
        }
    }
    Ok(GraphFeatures { node, edge })
}

/// Evaluate the discovered features on every graph; with `filter_zero_response`,
/// drop columns that vanish on the whole dataset.
pub fn compute_features(
    ds: &Dataset,
    model: Model,
    min_degree: usize,
    max_degree: usize,
    filter_zero_response: bool,
) -> Result<FeatureTable> {
    let hs = discover_features(model, min_degree, max_degree)?;
    let (node_hs, edge_hs): (Vec<MultiGraphH>, Vec<MultiGraphH>) =
        hs.into_iter().partition(|h| h.output_kind() == OutputKind::Node);
    let per_graph = par::map(&ds.graphs, |(id, g)| {
        graph_features(g, &node_hs, &edge_hs).map_err(|e| Error::Dataset {
            id: id.clone(),
            reason: e.to_string(),
        })
    });
    let mut graphs = BTreeMap::new();
    for ((id, _), f) in ds.graphs.iter().zip(per_graph) {
        graphs.insert(id.clone(), f?);
    }
    let mut table = FeatureTable {
        model,
        degrees: (min_degree..=max_degree).collect(),
        columns: Columns {
            node: node_hs.iter().map(|h| h.to_string()).collect(),
            edge: edge_hs.iter().map(|h| h.to_string()).collect(),
        },
        graphs,
    };
    if filter_zero_response {
        drop_zero_columns(&mut table);
    }
    Ok(table)
}

fn drop_zero_columns(t: &mut FeatureTable) {
    let keep_node: Vec<bool> = (0..t.columns.node.len())
        .map(|k| t.graphs.values().any(|g| g.node.iter().any(|row| row[k] != 0)))
        .collect();
    let keep_edge: Vec<bool> = (0..t.columns.edge.len())
        .map(|k| t.graphs.values().any(|g| g.edge.iter().flatten().any(|cell| cell[k] != 0)))
        .collect();
    let filter = |v: &mut Vec<i64>, keep: &[bool]| {
        let mut k = 0;
        v.retain(|_| {
            k += 1;
            keep[k - 1]
        });
    };
    let mut k = 0;
    t.columns.node.retain(|_| {
        k += 1;
        keep_node[k - 1]
    });
    let mut k = 0;
    t.columns.edge.retain(|_| {
        k += 1;
        keep_edge[k - 1]
    });
    for g in t.graphs.values_mut() {
        for row in &mut g.node {
            filter(row, &keep_node);
        }
        for cell in g.edge.iter_mut().flatten() {
            filter(cell, &keep_edge);
        }
    }
}

pub fn features_to_json(table: &FeatureTable) -> Result<String> {
    Ok(serde_json::to_string(table)?)
}

pub fn write_features(table: &FeatureTable, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(features_to_json(table)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}
