//! Hyperparameter file read by `fit` and `curve`.

use std::path::Path;

use anyhow::Result;
use mrf_core::node_recovery::{default_rho_max, estimate_q_s, mrw_chain_sizes, BackwardMapConfig, LassoOptions, NodeRecoveryConfig};
use mrf_core::{FeatureSpace, GriseConfig, Projection, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::io::{BasisDto, DomainDto};
use crate::UsageError;

/// Everything a fit needs except the data; never contains the true parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParams {
    pub basis: BasisDto,
    pub domain: DomainDto,
    pub theta_max: f64,
    pub theta_min: f64,
    /// Degree bound; defaults to `p − 1`.
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub grise: GriseParams,
    #[serde(default)]
    pub node_recovery: NodeParams,
    #[serde(default)]
    pub sampler: SamplerParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GriseParams {
    pub epsilon: f64,
    pub max_iters: usize,
    /// Initial step; `null` uses the analysis default.
    pub eta0: Option<f64>,
    pub patience: usize,
    /// Project returned vertices onto the feasible set.
    pub project: bool,
}

impl Default for GriseParams {
    fn default() -> Self {
        Self { epsilon: 1e-4, max_iters: 2000, eta0: None, patience: 200, project: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodeParams {
    /// Bin width; `null` uses `0.1·b_u`.
    pub bin_width: Option<f64>,
    pub average_over_z: usize,
    /// Box radius of the backward map; `null` uses the default for `(k, d, θ_max)`.
    pub rho_max: Option<f64>,
    /// Exact quadrature means in the backward map instead of MRW estimates.
    pub quadrature_backward_map: bool,
    /// Target accuracy of the backward map.
    pub eps6: f64,
    /// MRW mean accuracy used to size the burn-in chain.
    pub eps5: f64,
    pub delta5: f64,
    /// MRW burn-in length; `null` uses the mixing bound at `eps5`.
    pub tau1: Option<usize>,
    /// MRW averaging length.
    pub tau2: usize,
    pub lasso_max_iters: usize,
    pub lasso_rel_tol: f64,
}

impl Default for NodeParams {
    fn default() -> Self {
        Self {
            bin_width: None,
            average_over_z: 1,
            rho_max: None,
            quadrature_backward_map: false,
            eps6: 0.01,
            eps5: 0.01,
            delta5: 0.05,
            tau1: None,
            tau2: 20_000,
            lasso_max_iters: LassoOptions::default().max_iters,
            lasso_rel_tol: LassoOptions::default().rel_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerParams {
    pub burn_in: usize,
    pub thin: usize,
    pub inner_mrw_steps: usize,
}

impl Default for SamplerParams {
    fn default() -> Self {
        let d = SamplerConfig::default();
        Self { burn_in: d.burn_in, thin: d.thin, inner_mrw_steps: d.inner_mrw_steps }
    }
}

impl SamplerParams {
    pub fn config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig { burn_in: self.burn_in, thin: self.thin, inner_mrw_steps: self.inner_mrw_steps, seed }
    }
}

impl HyperParams {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }

    pub fn space(&self) -> Result<FeatureSpace> {
        Ok(FeatureSpace::new(self.basis.family()?, self.domain.domain()?)?)
    }

    pub fn degree(&self, p: usize) -> usize {
        self.d.unwrap_or(p.saturating_sub(1)).max(1)
    }

    /// `γ = θ_max(k + k²d)`.
    pub fn gamma(&self, p: usize) -> f64 {
        let k = self.basis.k as f64;
        self.theta_max * (k + k * k * self.degree(p) as f64)
    }

    pub fn grise_config(&self, p: usize) -> Result<GriseConfig> {
        let g = &self.grise;
        let cfg = GriseConfig {
            epsilon: g.epsilon,
            gamma: self.gamma(p),
            max_iters: g.max_iters,
            eta0: g.eta0,
            patience: g.patience,
            projection: g.project.then_some(Projection { theta_min: self.theta_min, theta_max: self.theta_max }),
        };
        cfg.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(cfg)
    }

    pub fn node_config(&self, space: &FeatureSpace, seed: u64, quadrature: bool) -> Result<NodeRecoveryConfig> {
        let np = &self.node_recovery;
        let bin_width = np.bin_width.unwrap_or(0.1 * space.domain().b_u());
        let backward = backward_config(space, self.degree(space.p()), self.theta_max, np, quadrature || np.quadrature_backward_map)?;
        let lasso = LassoOptions { degree_bound: None, max_iters: np.lasso_max_iters, rel_tol: np.lasso_rel_tol };
        Ok(NodeRecoveryConfig { bin_width, lasso, backward, average_over_z: np.average_over_z.max(1), seed })
    }
}

/// Backward-map settings. Step size and `τ3` follow the convergence analysis with exact means;
/// in MRW mode the chain lengths come from `tau1`/`tau2` because the analysis sizes are
/// out of reach at practical accuracies.
pub fn backward_config(space: &FeatureSpace, d: usize, theta_max: f64, np: &NodeParams, quadrature: bool) -> Result<BackwardMapConfig> {
    let basis = space.basis();
    let rho_max = np.rho_max.unwrap_or_else(|| default_rho_max(space.k(), d, theta_max, space.phi_max()));
    let q_s = space.domain().intervals().iter().map(|&iv| estimate_q_s(basis, iv, rho_max)).fold(f64::INFINITY, f64::min);
    let (b_l, b_u) = (space.domain().b_l(), space.domain().b_u());
    let mut cfg = BackwardMapConfig::from_constants(basis, b_l, b_u, rho_max, q_s, np.eps5, np.eps6, np.delta5, true)
        .map_err(|e| UsageError(e.to_string()))?;
    if !quadrature {
        cfg.quadrature_mode = false;
        cfg.tau1 = np.tau1.unwrap_or_else(|| mrw_chain_sizes(space.k(), b_l, b_u, rho_max, space.phi_max(), np.eps5, np.delta5).0);
        cfg.tau2 = np.tau2;
    }
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}
