//! Edge thresholding and recovery scores.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{shape, Result};
use crate::grise::GriseSolution;

/// Unordered pairs `(i, j)` with `i < j < p`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    p: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn empty(p: usize) -> Self {
        Self { p, pairs: BTreeSet::new() }
    }

    /// Set from pairs in either orientation; self-loops and out-of-range nodes are rejected.
    pub fn from_pairs(p: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = Self::empty(p);
        for (a, b) in pairs {
            set.insert(a, b)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.p || b >= self.p {
            return Err(shape(format!("invalid edge ({a}, {b}) for p={}", self.p)));
        }
        self.pairs.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// Neighbours of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .pairs
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn max_degree(&self) -> usize {
        (0..self.p).map(|i| self.neighbors(i).len()).max().unwrap_or(0)
    }
}

/// Recovered edges and the number of pairs where the two endpoints disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecovery {
    pub edges: EdgeSet,
    pub disagreements: usize,
}

fn block_exceeds(block: &[f64], threshold: f64) -> bool {
    block.iter().any(|v| v.abs() > threshold)
}

/// Thresholds at `theta_min / 3` (strict), reading each pair from its lower-indexed node.
pub fn recover_edges(solutions: &[GriseSolution], theta_min: f64) -> Result<EdgeRecovery> {
    recover_edges_at(solutions, theta_min / 3.0)
}

/// Same rule with an explicit threshold.
pub fn recover_edges_at(solutions: &[GriseSolution], threshold: f64) -> Result<EdgeRecovery> {
    let p = solutions.len();
    for (i, s) in solutions.iter().enumerate() {
        if s.vertex.p() != p || s.vertex.node() != i {
            return Err(shape(format!("solution {i} does not belong to a {p}-node fit")));
        }
    }
    let mut edges = EdgeSet::empty(p);
    let mut disagreements = 0;
    for i in 0..p {
        for j in i + 1..p {
            let low = block_exceeds(solutions[i].vertex.edge_block(j), threshold);
            let high = block_exceeds(solutions[j].vertex.edge_block(i), threshold);
            if low {
                edges.insert(i, j)?;
            }
            if low != high {
                disagreements += 1;
            }
        }
    }
    Ok(EdgeRecovery { edges, disagreements })
}

/// Precision, recall and exact equality of two edge sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryScore {
    pub precision: f64,
    pub recall: f64,
    pub exact: bool,
}

/// Set precision and recall; an empty estimate has precision 1, an empty truth recall 1.
pub fn score_recovery(truth: &EdgeSet, estimate: &EdgeSet) -> Result<RecoveryScore> {
    if truth.p() != estimate.p() {
        return Err(shape("edge sets have different p"));
    }
    let hits = estimate.iter().filter(|&(a, b)| truth.contains(a, b)).count() as f64;
    let precision = if estimate.is_empty() { 1.0 } else { hits / estimate.len() as f64 };
    let recall = if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 };
    Ok(RecoveryScore { precision, recall, exact: truth == estimate })
}
