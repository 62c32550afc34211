//! Node-parameter recovery: binned robust Lasso for conditional means, MRW mean
//! estimation, projected-gradient backward mapping and final assembly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{config, shape, Result};
use crate::grise::GriseSolution;
use crate::lasso::{robust_lasso, LassoProblem};
use crate::linalg::symmetric_eigenvalues;
use crate::math::{ceil, exp, ln, powf, powi, sqrt};
use crate::model::{moments_1d, Basis, FeatureSpace, Interval};
use crate::mrw::Mrw1d;
use crate::quadrature::DEFAULT_NODES;
use crate::sampler::{stream_rng, SampleMatrix};
use crate::structure::EdgeSet;

/// Largest admissible number of bins `p̃`.
pub const MAX_BINS: usize = 1_000_000;

/// Tensor-product binning of the neighbours of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningScheme {
    t: f64,
    neighbors: Vec<usize>,
    intervals: Vec<Interval>,
    counts: Vec<usize>,
    total: usize,
}

impl BinningScheme {
    /// Bins of width `t` for each neighbour interval; errors when `p̃` exceeds [`MAX_BINS`].
    pub fn new(t: f64, neighbors: Vec<usize>, intervals: Vec<Interval>) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(config("bin width t must be positive"));
        }
        if neighbors.len() != intervals.len() {
            return Err(shape("one interval per neighbour required"));
        }
        let counts: Vec<usize> = intervals.iter().map(|iv| (ceil(iv.len() / t) as usize).max(1)).collect();
        let mut total: usize = 1;
        for &c in &counts {
            total = total.checked_mul(c).filter(|&v| v <= MAX_BINS).ok_or_else(|| {
                config(format!("more than {MAX_BINS} bins; increase the bin width t (currently {t})"))
            })?;
        }
        Ok(Self { t, neighbors, intervals, counts, total })
    }

    /// Scheme for the neighbours of a node in `space`.
    pub fn for_space(space: &FeatureSpace, neighbors: &[usize], t: f64) -> Result<Self> {
        let ivs = neighbors.iter().map(|&j| space.domain().interval(j)).collect();
        Self::new(t, neighbors.to_vec(), ivs)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    /// Number of tensor bins `p̃`.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Interval index `ζ ∈ {1, …, ⌈(u−l)/t⌉}` with `x ∈ (l + (ζ−1)t, l + ζt]`.
    pub fn interval_index(&self, slot: usize, x: f64) -> usize {
        let iv = self.intervals[slot];
        let z = ceil((x - iv.l) / self.t) as i64;
        z.clamp(1, self.counts[slot] as i64) as usize
    }

    /// Position of the single one in the tensor one-hot code of the neighbour values.
    pub fn bin_index(&self, x_neighbors: &[f64]) -> usize {
        let mut idx = 0;
        for (slot, &x) in x_neighbors.iter().enumerate() {
            idx = idx * self.counts[slot] + (self.interval_index(slot, x) - 1);
        }
        idx
    }

    /// Dense one-hot code of length `p̃`.
    pub fn bin_features(&self, x_neighbors: &[f64]) -> Result<Vec<f64>> {
        if x_neighbors.len() != self.neighbors.len() {
            return Err(shape("one value per neighbour required"));
        }
        for (iv, &x) in self.intervals.iter().zip(x_neighbors) {
            iv.check(x)?;
        }
        let mut out = vec![0.0; self.total];
        out[self.bin_index(x_neighbors)] = 1.0;
        Ok(out)
    }

    fn sample_index(&self, row: &[f64]) -> usize {
        let mut idx = 0;
        for (slot, &j) in self.neighbors.iter().enumerate() {
            idx = idx * self.counts[slot] + (self.interval_index(slot, row[j]) - 1);
        }
        idx
    }
}

/// Lipschitz constant `L1 = 2k²θ_max φ_max² φ̄_max` of the conditional means.
pub fn lipschitz_constant(k: usize, theta_max: f64, phi_max: f64, phi_bar_max: f64) -> f64 {
    2.0 * (k * k) as f64 * theta_max * phi_max * phi_max * phi_bar_max
}

/// Bin width `t = ε4² / (8√2 L1 d)` used by the sample-complexity argument.
pub fn proof_bin_width(eps4: f64, l1: f64, d: usize) -> f64 {
    eps4 * eps4 / (8.0 * core::f64::consts::SQRT_2 * l1 * d.max(1) as f64)
}

/// `ℓ1` radius `c̃2 = φ_max (b_u/t)^d`.
pub fn lasso_radius(phi_max: f64, b_u: f64, t: f64, d: usize) -> f64 {
    phi_max * powi(b_u / t, d as u32)
}

/// Expected in-sample prediction error bound `4ω̃0² + 4c̃1c̃2σ̃√(2 ln(2p̃)/n)`.
pub fn lasso_mspe_bound(omega0: f64, c1: f64, c2: f64, sigma: f64, p_tilde: usize, n: usize) -> f64 {
    4.0 * omega0 * omega0 + 4.0 * c1 * c2 * sigma * sqrt(2.0 * ln(2.0 * p_tilde as f64) / n as f64)
}

/// Estimates `μ*(x_{−i}^{(z)})` by one binned robust-Lasso regression per statistic.
pub fn estimate_conditional_means(
    space: &FeatureSpace,
    samples: &SampleMatrix,
    i: usize,
    scheme: &BinningScheme,
    z: usize,
    opts: &LassoOptions,
) -> Result<Vec<f64>> {
    if samples.n() == 0 {
        return Err(shape("conditional means need samples"));
    }
    if z >= samples.n() {
        return Err(shape(format!("sample index {z} out of range")));
    }
    let k = space.k();
    let radius = lasso_radius(space.phi_max(), space.domain().b_u(), scheme.t(), opts.degree_bound.unwrap_or(scheme.neighbors().len()));
    let rows: Vec<Vec<u32>> = samples.rows().map(|r| vec![scheme.sample_index(r) as u32]).collect();
    let target = scheme.sample_index(samples.row(z));
    let mut phi = vec![0.0; k];
    let mut responses = vec![Vec::with_capacity(samples.n()); k];
    for r in samples.rows() {
        space.basis().eval_into(r[i], &mut phi);
        for j in 0..k {
            responses[j].push(phi[j]);
        }
    }
    let mut out = Vec::with_capacity(k);
    for y in responses {
        let norm2: f64 = y.iter().map(|v| v * v).sum();
        let problem = LassoProblem::new(scheme.len(), rows.clone(), y, radius)?;
        let sol = robust_lasso(&problem, opts.max_iters, opts.rel_tol * norm2)?;
        out.push(sol.beta[target]);
    }
    Ok(out)
}

/// Lasso settings used inside node recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    /// `d` in `c̃2 = φ_max (b_u/t)^d`; `None` uses the number of neighbours.
    pub degree_bound: Option<usize>,
    pub max_iters: usize,
    /// Duality-gap tolerance relative to `‖y‖²`.
    pub rel_tol: f64,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self { degree_bound: None, max_iters: 1_000_000, rel_tol: 1e-8 }
    }
}

/// Chain sizes `(τ1, τ2)` that make the MRW mean `ε`-accurate with probability `1 − kδ`.
pub fn mrw_chain_sizes(k: usize, b_l: f64, b_u: f64, rho_max: f64, phi_max: f64, eps: f64, delta: f64) -> (usize, usize) {
    let kf = k as f64;
    let tau1 = 8.0 * kf / (b_l * b_l) * rho_max * phi_max * exp(12.0 * kf * rho_max * phi_max)
        * ln(4.0 * phi_max * sqrt(b_u) / (eps * sqrt(b_l)));
    let tau2 = 8.0 * phi_max * phi_max / (eps * eps) * ln(2.0 / delta);
    (ceil(tau1.max(1.0)) as usize, ceil(tau2.max(1.0)) as usize)
}

/// Averages `φ` at the end of `tau2` chains of `tau1 + 1` steps started at `w0`.
pub fn mrw_mean_estimate<R: Rng + ?Sized>(
    basis: &Basis,
    rho: &[f64],
    iv: Interval,
    tau1: usize,
    tau2: usize,
    w0: f64,
    rng: &mut R,
) -> Vec<f64> {
    mrw_mean_with(basis, rho, iv, tau2, rng, |m, rng| m.run_coalescing(w0, tau1 + 1, rng))
}

/// As [`mrw_mean_estimate`], simulating every accept/reject step.
pub fn mrw_mean_estimate_literal<R: Rng + ?Sized>(
    basis: &Basis,
    rho: &[f64],
    iv: Interval,
    tau1: usize,
    tau2: usize,
    w0: f64,
    rng: &mut R,
) -> Vec<f64> {
    mrw_mean_with(basis, rho, iv, tau2, rng, |m, rng| m.run_literal(w0, tau1 + 1, rng))
}

fn mrw_mean_with<R: Rng + ?Sized>(
    basis: &Basis,
    rho: &[f64],
    iv: Interval,
    tau2: usize,
    rng: &mut R,
    mut chain: impl FnMut(&mut Mrw1d<'_>, &mut R) -> f64,
) -> Vec<f64> {
    let k = basis.k();
    let mut kernel = Mrw1d::new(basis, rho, iv);
    let mut acc = vec![0.0; k];
    let mut phi = vec![0.0; k];
    for _ in 0..tau2 {
        let w = chain(&mut kernel, rng);
        basis.eval_into(w, &mut phi);
        for (a, f) in acc.iter_mut().zip(&phi) {
            *a += f;
        }
    }
    acc.iter_mut().for_each(|a| *a /= tau2.max(1) as f64);
    acc
}

/// Projected-gradient settings for the backward map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardMapConfig {
    pub rho_max: f64,
    pub xi: f64,
    pub tau1: usize,
    pub tau2: usize,
    pub tau3: usize,
    /// Exact quadrature means instead of MRW estimates.
    pub quadrature_mode: bool,
    pub quadrature_nodes: usize,
}

impl BackwardMapConfig {
    /// Sizes from the convergence analysis: `ξ = 1/c̄2`, `τ3 = (c̄2/c̄1) ln(kρ_max²/(ε6² − c̄3))`,
    /// and MRW sizes for accuracy `ε5` with failure probability `δ5` spread over `kτ3` calls.
    #[allow(clippy::too_many_arguments)]
    pub fn from_constants(
        basis: &Basis,
        b_l: f64,
        b_u: f64,
        rho_max: f64,
        q_s: f64,
        eps5: f64,
        eps6: f64,
        delta5: f64,
        quadrature_mode: bool,
    ) -> Result<Self> {
        let k = basis.k();
        let phi_max = basis.phi_max();
        let c2 = 2.0 * k as f64 * phi_max * phi_max;
        let c3 = if quadrature_mode { 0.0 } else { 4.0 * k as f64 * eps5 * (eps5 + 2.0 * c2 * rho_max + 2.0 * phi_max) / (q_s * c2) };
        let room = eps6 * eps6 - c3;
        if !(q_s > 0.0) || !(room > 0.0) {
            return Err(config(format!("backward map needs q_s > 0 and eps6² > c̄3 (c̄3 = {c3})")));
        }
        let tau3 = ceil((c2 / q_s * ln(k as f64 * rho_max * rho_max / room)).max(1.0)) as usize;
        let (tau1, tau2) = if quadrature_mode {
            (1, 1)
        } else {
            let (t1, _) = mrw_chain_sizes(k, b_l, b_u, rho_max, phi_max, eps5, delta5);
            let t2 = 8.0 * phi_max * phi_max / (eps5 * eps5) * ln(2.0 * k as f64 * tau3 as f64 / delta5);
            (t1, ceil(t2) as usize)
        };
        Ok(Self { rho_max, xi: 1.0 / c2, tau1, tau2, tau3, quadrature_mode, quadrature_nodes: DEFAULT_NODES })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.rho_max > 0.0) || self.tau1 == 0 || self.tau2 == 0 || self.tau3 == 0 {
            return Err(config("backward map needs xi > 0, rho_max > 0 and positive iteration counts"));
        }
        Ok(())
    }
}

/// Canonical parameter `ρ̂` whose mean statistics match `υ̂`, by projected gradient descent on the box `‖ρ‖_∞ ≤ ρ_max`.
pub fn backward_map<R: Rng + ?Sized>(
    basis: &Basis,
    upsilon: &[f64],
    iv: Interval,
    cfg: &BackwardMapConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut last = Vec::new();
    backward_map_trace(basis, upsilon, iv, cfg, rng, |rho| last = rho.to_vec())?;
    Ok(last)
}

/// As [`backward_map`], reporting `ρ^(1), …, ρ^(τ3+1)` to `observer`.
pub fn backward_map_trace<R: Rng + ?Sized>(
    basis: &Basis,
    upsilon: &[f64],
    iv: Interval,
    cfg: &BackwardMapConfig,
    rng: &mut R,
    mut observer: impl FnMut(&[f64]),
) -> Result<()> {
    cfg.validate()?;
    if upsilon.len() != basis.k() {
        return Err(shape("mean vector length differs from k"));
    }
    let w0 = if iv.contains(0.0) { 0.0 } else { iv.midpoint() };
    let mut rho = vec![0.0; basis.k()];
    for _ in 0..=cfg.tau3 {
        let nu = if cfg.quadrature_mode {
            moments_1d(basis, &rho, iv, cfg.quadrature_nodes).0
        } else {
            mrw_mean_estimate(basis, &rho, iv, cfg.tau1, cfg.tau2, w0, rng)
        };
        for ((r, n), u) in rho.iter_mut().zip(&nu).zip(upsilon) {
            *r = (*r - cfg.xi * (n - u)).clamp(-cfg.rho_max, cfg.rho_max);
        }
        observer(&rho);
    }
    Ok(())
}

/// `θ̂^(i)_r = λ̂_r − Σ_{j∈N̂(i)} Σ_s θ̂^(ij)_rs φ_s(x_j)`, with blocks read from node `i`'s estimate.
pub fn recover_node_params(
    basis: &Basis,
    i: usize,
    lambda_hat: &[f64],
    estimate: &GriseSolution,
    neighbors: &[usize],
    x_z: &[f64],
) -> Result<Vec<f64>> {
    let k = basis.k();
    let v = &estimate.vertex;
    if lambda_hat.len() != k || v.node() != i || v.k() != k || x_z.len() != v.p() {
        return Err(shape("node recovery inputs have inconsistent shapes"));
    }
    let mut theta = lambda_hat.to_vec();
    let mut phi = vec![0.0; k];
    for &j in neighbors {
        if j == i || j >= v.p() {
            return Err(shape(format!("invalid neighbour {j} of node {i}")));
        }
        basis.eval_into(x_z[j], &mut phi);
        let block = v.edge_block(j);
        for r in 0..k {
            theta[r] -= (0..k).map(|s| block[r * k + s] * phi[s]).sum::<f64>();
        }
    }
    Ok(theta)
}

/// Settings of the three-step node recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRecoveryConfig {
    /// Bin width `t`.
    pub bin_width: f64,
    pub lasso: LassoOptions,
    pub backward: BackwardMapConfig,
    /// Number of sample indices `z` whose estimates are averaged (1 = single draw).
    pub average_over_z: usize,
    pub seed: u64,
}

/// Intermediate and final quantities of one node's recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEstimate {
    pub node: usize,
    pub theta: Vec<f64>,
    pub sample_indices: Vec<usize>,
    pub mu_hat: Vec<Vec<f64>>,
    pub lambda_hat: Vec<Vec<f64>>,
}

/// Runs conditional-mean estimation, backward mapping and assembly for node `i`.
pub fn recover_node(
    space: &FeatureSpace,
    samples: &SampleMatrix,
    estimate: &GriseSolution,
    neighbors: &[usize],
    cfg: &NodeRecoveryConfig,
) -> Result<NodeEstimate> {
    let i = estimate.vertex.node();
    if samples.n() == 0 {
        return Err(shape("node recovery needs samples"));
    }
    let k = space.k();
    let scheme = BinningScheme::for_space(space, neighbors, cfg.bin_width)?;
    let mut rng = stream_rng(cfg.seed, i as u64);
    let reps = cfg.average_over_z.max(1);
    let mut theta = vec![0.0; k];
    let mut out = NodeEstimate { node: i, theta: Vec::new(), sample_indices: Vec::new(), mu_hat: Vec::new(), lambda_hat: Vec::new() };
    for _ in 0..reps {
        let z = rng.random_range(0..samples.n());
        let mu = estimate_conditional_means(space, samples, i, &scheme, z, &cfg.lasso)?;
        let lam = backward_map(space.basis(), &mu, space.domain().interval(i), &cfg.backward, &mut rng)?;
        let th = recover_node_params(space.basis(), i, &lam, estimate, neighbors, samples.row(z))?;
        for (a, b) in theta.iter_mut().zip(&th) {
            *a += b / reps as f64;
        }
        out.sample_indices.push(z);
        out.mu_hat.push(mu);
        out.lambda_hat.push(lam);
    }
    out.theta = theta;
    Ok(out)
}

/// Node parameters of every node, in node order.
pub fn full_node_pipeline(
    space: &FeatureSpace,
    samples: &SampleMatrix,
    solutions: &[GriseSolution],
    edges: &EdgeSet,
    cfg: &NodeRecoveryConfig,
) -> Result<Vec<Vec<f64>>> {
    if solutions.len() != space.p() || edges.p() != space.p() {
        return Err(shape("one GRISE solution per node required"));
    }
    solutions
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(recover_node(space, samples, s, &edges.neighbors(i), cfg)?.theta))
        .collect()
}

/// Default box radius: the larger of `2kdθ_max φ_max` and `θ_max(1 + kdφ_max)`.
pub fn default_rho_max(k: usize, d: usize, theta_max: f64, phi_max: f64) -> f64 {
    let kd = (k * d) as f64;
    (2.0 * kd * theta_max * phi_max).max(theta_max * (1.0 + kd * phi_max))
}

/// Minimum and maximum Fisher eigenvalues of `∝ exp(ρ·φ)` over a `grid^k` lattice on `[−ρ_max, ρ_max]^k`.
pub fn fisher_eigen_range(basis: &Basis, iv: Interval, rho_max: f64, grid: usize, nodes: usize) -> (f64, f64) {
    let k = basis.k();
    let grid = grid.max(2);
    let total = powf(grid as f64, k as f64) as usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut rho = vec![0.0; k];
    for idx in 0..total {
        let mut rem = idx;
        for r in rho.iter_mut() {
            let q = rem % grid;
            rem /= grid;
            *r = -rho_max + 2.0 * rho_max * q as f64 / (grid - 1) as f64;
        }
        let (_, cov) = moments_1d(basis, &rho, iv, nodes);
        let ev = symmetric_eigenvalues(&cov, k);
        lo = lo.min(ev[0]);
        hi = hi.max(ev[k - 1]);
    }
    (lo, hi)
}

/// Grid estimate of `q^s` (default `21^k` lattice).
pub fn estimate_q_s(basis: &Basis, iv: Interval, rho_max: f64) -> f64 {
    fisher_eigen_range(basis, iv, rho_max, 21, DEFAULT_NODES).0
}
