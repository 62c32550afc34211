//! Parameter and structure errors of an estimate against a true model.

use anyhow::{ensure, Result};
use mrf_core::structure::score_recovery;
use mrf_core::{EdgeSet, GriseSolution, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::io::EdgeDto;

/// Interaction blocks of `edges`, read from the lower-indexed node's solution.
pub fn edge_params(solutions: &[GriseSolution], edges: &EdgeSet) -> Vec<EdgeDto> {
    edges
        .iter()
        .map(|(i, j)| {
            let k = solutions[i].vertex.k();
            let block = solutions[i].vertex.edge_block(j).chunks(k).map(<[f64]>::to_vec).collect();
            EdgeDto { i, j, block }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `‖θ̂ − θ*‖_∞` over node and edge parameters; edges-only estimates cover edges alone.
    pub linf_error: f64,
    pub edge_linf_error: f64,
    pub node_linf_error: Option<f64>,
    pub precision: f64,
    pub recall: f64,
    pub exact_recovery: bool,
    pub true_edges: usize,
    pub estimated_edges: usize,
}

/// Compares estimated parameters with `truth`; pairs without an estimated block count as zero.
pub fn evaluate(truth: &ModelSpec, edges: &EdgeSet, blocks: &[EdgeDto], node_params: Option<&[Vec<f64>]>) -> Result<Metrics> {
    let (p, k) = (truth.p(), truth.k());
    ensure!(edges.p() == p, "estimate has p = {}, truth has p = {p}", edges.p());
    let mut edge_err: f64 = 0.0;
    let mut seen = EdgeSet::empty(p);
    for e in blocks {
        ensure!(e.i < e.j && e.j < p, "edge ({}, {}) out of range", e.i, e.j);
        ensure!(e.block.len() == k && e.block.iter().all(|r| r.len() == k), "edge block ({}, {}) is not {k}×{k}", e.i, e.j);
        seen.insert(e.i, e.j)?;
        for (r, row) in e.block.iter().enumerate() {
            for (s, &v) in row.iter().enumerate() {
                let t = truth.edges().get(&(e.i, e.j)).map_or(0.0, |b| b.get(r, s));
                edge_err = edge_err.max((v - t).abs());
            }
        }
    }
    for (&(i, j), b) in truth.edges() {
        if !seen.contains(i, j) {
            edge_err = edge_err.max(b.values().iter().fold(0.0, |m, v| m.max(v.abs())));
        }
    }
    let node_err = match node_params {
        Some(np) => {
            ensure!(np.len() == p && np.iter().all(|v| v.len() == k), "node parameters have the wrong shape");
            let err = np.iter().zip(truth.node_params()).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max);
            Some(err)
        }
        None => None,
    };
    let score = score_recovery(&truth.edge_set(), edges)?;
    Ok(Metrics {
        linf_error: edge_err.max(node_err.unwrap_or(0.0)),
        edge_linf_error: edge_err,
        node_linf_error: node_err,
        precision: score.precision,
        recall: score.recall,
        exact_recovery: score.exact,
        true_edges: truth.edges().len(),
        estimated_edges: edges.len(),
    })
}
