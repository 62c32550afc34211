//! Versioned JSON run report.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use mrf_core::{EdgeSet, GriseSolution};
use serde::{Deserialize, Serialize};

use crate::io::{BasisDto, DomainDto, EdgeDto};

/// Schema version written by this build; readers accept any `1.x`.
pub const SCHEMA_VERSION: &str = "1.0";

/// GRISE outcome for one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTelemetry {
    pub node: usize,
    pub objective: f64,
    pub unconstrained_objective: f64,
    pub iterations_used: usize,
    pub best_iterate_index: usize,
    /// Returned vertex parameter, node block first then one block per other node.
    pub vertex: Vec<f64>,
}

impl NodeTelemetry {
    pub fn of(node: usize, s: &GriseSolution) -> Self {
        Self {
            node,
            objective: s.objective,
            unconstrained_objective: s.unconstrained_objective,
            iterations_used: s.iterations_used,
            best_iterate_index: s.best_iterate_index,
            vertex: s.vertex.values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub grise_seconds: f64,
    pub node_recovery_seconds: f64,
    pub total_seconds: f64,
}

/// Result of `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    /// Path of the sample file the fit read.
    pub samples_ref: String,
    pub n: usize,
    pub p: usize,
    pub names: Vec<String>,
    pub basis: BasisDto,
    pub domain: DomainDto,
    pub seed: u64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub grise: Vec<NodeTelemetry>,
    /// Recovered edges as 0-based `[i, j]` with `i < j`.
    pub edges: Vec<[usize; 2]>,
    pub disagreements: usize,
    /// Estimated interaction blocks of the recovered edges, read from the lower-indexed node.
    pub edge_params: Vec<EdgeDto>,
    /// Node parameters; absent for edges-only fits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_params: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
    pub timings: Timings,
}

impl RunReport {
    pub fn edge_set(&self) -> Result<EdgeSet> {
        Ok(EdgeSet::from_pairs(self.p, self.edges.iter().map(|e| (e[0], e[1])))?)
    }

    /// Checks shapes and that every number is finite.
    pub fn validate(&self) -> Result<()> {
        ensure!(major(&self.schema_version)? == major(SCHEMA_VERSION)?, "unsupported report schema version {}", self.schema_version);
        ensure!(self.names.len() == self.p && self.domain.l.len() == self.p, "report shapes disagree with p = {}", self.p);
        ensure!(self.grise.len() == self.p, "report has {} GRISE entries for p = {}", self.grise.len(), self.p);
        self.edge_set()?;
        ensure!(self.numbers().all(f64::is_finite), "report contains a non-finite number");
        ensure!(self.diagnostics.as_ref().is_none_or(all_finite), "report diagnostics contain a non-finite number");
        for (idx, e) in self.edge_params.iter().enumerate() {
            ensure!(e.block.len() == self.basis.k && e.block.iter().all(|r| r.len() == self.basis.k), "edge block {idx} has the wrong shape");
        }
        if let Some(np) = &self.node_params {
            ensure!(np.len() == self.p && np.iter().all(|v| v.len() == self.basis.k), "node parameters have the wrong shape");
        }
        Ok(())
    }

    fn numbers(&self) -> impl Iterator<Item = f64> + '_ {
        let scalars = [self.theta_min, self.theta_max, self.domain.b_l, self.domain.b_u, self.timings.grise_seconds, self.timings.node_recovery_seconds, self.timings.total_seconds];
        scalars
            .into_iter()
            .chain(self.domain.l.iter().chain(&self.domain.u).copied())
            .chain(self.grise.iter().flat_map(|g| [g.objective, g.unconstrained_objective].into_iter().chain(g.vertex.iter().copied())))
            .chain(self.edge_params.iter().flat_map(|e| e.block.iter().flatten().copied()))
            .chain(self.node_params.iter().flatten().flatten().copied())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and validates; unknown major versions are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text).context("report is not JSON")?;
        let version = raw.get("schema_version").and_then(|v| v.as_str()).context("report lacks schema_version")?;
        if major(version)? != major(SCHEMA_VERSION)? {
            bail!("unsupported report schema version {version}");
        }
        let report: Self = serde_json::from_value(raw).context("malformed report")?;
        report.validate()?;
        Ok(report)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot open {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("reading {}", path.display()))
    }
}

fn major(version: &str) -> Result<u64> {
    version.split('.').next().and_then(|m| m.parse().ok()).with_context(|| format!("bad schema version {version:?}"))
}

fn all_finite(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        serde_json::Value::Array(a) => a.iter().all(all_finite),
        serde_json::Value::Object(o) => o.values().all(all_finite),
        _ => true,
    }
}
