//! The generalized interaction screening objective (GISO), its gradient, and the
//! entropic-descent solver on the lifted simplex.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, numeric, shape, Result};
use crate::math::{exp, ln, sqrt};
use crate::model::{FeatureSpace, VertexParameter};
use crate::sampler::SampleMatrix;

/// Rows of `φ^(i)(x^(t))` for one node, stored row-major `n × dim`.
#[derive(Debug, Clone)]
pub struct NodeFeatures {
    node: usize,
    p: usize,
    k: usize,
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl NodeFeatures {
    /// Evaluates the centered feature vector of node `i` on every sample.
    pub fn build(space: &FeatureSpace, samples: &SampleMatrix, i: usize) -> Result<Self> {
        if samples.p() != space.p() {
            return Err(shape(format!("samples have p={}, model has p={}", samples.p(), space.p())));
        }
        if i >= space.p() {
            return Err(shape(format!("node {i} out of range")));
        }
        let dim = space.dim();
        let mut data = vec![0.0; samples.n() * dim];
        let mut scratch = vec![0.0; space.p() * space.k()];
        for (t, row) in samples.rows().enumerate() {
            space.domain().check_point(row)?;
            space.feature_into(i, row, &mut data[t * dim..(t + 1) * dim], &mut scratch);
        }
        Ok(Self { node: i, p: space.p(), k: space.k(), n: samples.n(), dim, data })
    }

    /// Features from raw rows (each of length `dim`).
    pub fn from_raw(node: usize, p: usize, k: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        let dim = crate::model::vertex_dim(p, k);
        if data.len() != n * dim {
            return Err(shape("feature matrix has the wrong size"));
        }
        Ok(Self { node, p, k, n, dim, data })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    /// `S_n(v) = (1/n) Σ_t exp(−v·φ^(i)(x^(t)))`.
    pub fn value(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for row in self.data.chunks_exact(self.dim) {
            s += exp(-dot(v, row));
        }
        s / self.n as f64
    }

    /// Writes `∇S_n(v)` into `grad` and returns `S_n(v)`; one exponential per sample.
    pub fn value_and_gradient(&self, v: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut s = 0.0;
        for row in self.data.chunks_exact(self.dim) {
            let e = exp(-dot(v, row));
            s += e;
            for (g, f) in grad.iter_mut().zip(row) {
                *g -= e * f;
            }
        }
        let inv = 1.0 / self.n as f64;
        grad.iter_mut().for_each(|g| *g *= inv);
        s * inv
    }

    /// Empirical feature correlation `(1/n) Σ_t φ φᵀ`, row-major.
    pub fn correlation(&self) -> Vec<f64> {
        let d = self.dim;
        let mut h = vec![0.0; d * d];
        for row in self.data.chunks_exact(d) {
            for a in 0..d {
                for b in 0..d {
                    h[a * d + b] += row[a] * row[b];
                }
            }
        }
        h.iter_mut().for_each(|x| *x /= self.n as f64);
        h
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// GISO of node `i` at `v`.
pub fn giso_value(space: &FeatureSpace, samples: &SampleMatrix, i: usize, v: &VertexParameter) -> Result<f64> {
    check_nonempty(samples)?;
    let f = NodeFeatures::build(space, samples, i)?;
    check_vertex(&f, v)?;
    Ok(f.value(v.values()))
}

/// Gradient of the GISO of node `i` at `v`.
pub fn giso_gradient(space: &FeatureSpace, samples: &SampleMatrix, i: usize, v: &VertexParameter) -> Result<Vec<f64>> {
    check_nonempty(samples)?;
    let f = NodeFeatures::build(space, samples, i)?;
    check_vertex(&f, v)?;
    let mut g = vec![0.0; f.dim()];
    f.value_and_gradient(v.values(), &mut g);
    Ok(g)
}

fn check_nonempty(samples: &SampleMatrix) -> Result<()> {
    if samples.n() == 0 {
        return Err(shape("GISO needs at least one sample"));
    }
    Ok(())
}

fn check_vertex(f: &NodeFeatures, v: &VertexParameter) -> Result<()> {
    if v.node() != f.node || v.p() != f.p || v.k() != f.k {
        return Err(shape("vertex parameter does not match the node features"));
    }
    Ok(())
}

/// Bounds of the feasible set `Λ` used by [`project_to_feasible`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub theta_min: f64,
    pub theta_max: f64,
}

/// Solver settings for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GriseConfig {
    /// Target optimality gap; also drives early stopping.
    pub epsilon: f64,
    /// Radius of the `ℓ1` ball.
    pub gamma: f64,
    /// Iteration cap `T`.
    pub max_iters: usize,
    /// Initial step; `None` uses `√(ln N) / (2γφ e^{γφ})`.
    pub eta0: Option<f64>,
    /// Stop once the best objective has not improved by `epsilon/10` for this many iterations.
    pub patience: usize,
    /// Projection onto `Λ` applied to the returned vertex.
    pub projection: Option<Projection>,
}

impl GriseConfig {
    pub fn new(epsilon: f64, gamma: f64, max_iters: usize) -> Self {
        Self { epsilon, gamma, max_iters, eta0: None, patience: 200, projection: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.gamma > 0.0 && self.max_iters >= 1) {
            return Err(config("GRISE needs epsilon > 0, gamma > 0 and max_iters ≥ 1"));
        }
        if let Some(e) = self.eta0 {
            if !(e > 0.0 && e.is_finite()) {
                return Err(config("eta0 must be positive"));
            }
        }
        Ok(())
    }
}

/// Size `2k²(p−1) + 2k + 1` of the lifted simplex for a `dim`-dimensional vertex.
pub fn simplex_size(dim: usize) -> usize {
    2 * dim + 1
}

/// Initial step `√(ln N) / (2γφ exp(γφ))`.
pub fn default_eta0(gamma: f64, varphi: f64, n_simplex: usize) -> f64 {
    sqrt(ln(n_simplex as f64)) / (2.0 * gamma * varphi * exp(gamma * varphi))
}

/// Iteration count `γ²φ² exp(2γφ) ln N / ε²` guaranteeing an `ε`-optimal output.
pub fn sufficient_iterations(gamma: f64, varphi: f64, epsilon: f64, n_simplex: usize) -> f64 {
    let g = gamma * varphi;
    g * g * exp(2.0 * g) * ln(n_simplex as f64) / (epsilon * epsilon)
}

/// Output of one GRISE solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GriseSolution {
    /// Returned estimate (projected onto `Λ` when configured).
    pub vertex: VertexParameter,
    /// GISO at `vertex`.
    pub objective: f64,
    /// Best iterate of the descent, before projection.
    pub unconstrained: VertexParameter,
    /// GISO at `unconstrained`.
    pub unconstrained_objective: f64,
    pub iterations_used: usize,
    /// 1-based index of the best iterate.
    pub best_iterate_index: usize,
}

/// State of the lifted simplex passed to an observer after each update.
#[derive(Debug, Clone, Copy)]
pub struct SimplexState<'a> {
    pub iteration: usize,
    pub w_plus: &'a [f64],
    pub w_minus: &'a [f64],
    pub y: f64,
    pub objective: f64,
}

/// Entropic descent for node `i`.
pub fn entropic_descent(space: &FeatureSpace, samples: &SampleMatrix, i: usize, cfg: &GriseConfig) -> Result<GriseSolution> {
    check_nonempty(samples)?;
    let f = NodeFeatures::build(space, samples, i)?;
    entropic_descent_on(&f, space.varphi_max(), cfg, |_| {})
}

/// Entropic descent on precomputed features, reporting each iterate to `observer`.
///
/// `w_±` and `y` are stored as logarithms so the multiplicative updates never
/// overflow; the normalisation is the same as dividing by `z`.
pub fn entropic_descent_on(
    f: &NodeFeatures,
    varphi: f64,
    cfg: &GriseConfig,
    mut observer: impl FnMut(&SimplexState<'_>),
) -> Result<GriseSolution> {
    cfg.validate()?;
    let d = f.dim();
    let n_simplex = simplex_size(d);
    let gamma = cfg.gamma;
    let init = ln(core::f64::consts::E / n_simplex as f64);
    let mut lw_plus = vec![init; d];
    let mut lw_minus = vec![init; d];
    let mut ly = init;
    let mut w_plus = vec![0.0; d];
    let mut w_minus = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut eta = cfg.eta0.unwrap_or_else(|| default_eta0(gamma, varphi, n_simplex));
    let mut best_v = vec![0.0; d];
    let mut best_obj = f64::INFINITY;
    let mut best_index = 1;
    let mut reference = f64::INFINITY;
    let mut last_gain = 1;
    let mut used = 0;
    let mut logs = Vec::with_capacity(n_simplex);
    for t in 1..=cfg.max_iters {
        used = t;
        for l in 0..d {
            w_plus[l] = exp(lw_plus[l]);
            w_minus[l] = exp(lw_minus[l]);
            v[l] = gamma * (w_plus[l] - w_minus[l]);
        }
        let obj = f.value_and_gradient(&v, &mut grad);
        if !obj.is_finite() {
            return Err(numeric(format!("GISO is not finite at iteration {t}")));
        }
        observer(&SimplexState { iteration: t, w_plus: &w_plus, w_minus: &w_minus, y: exp(ly), objective: obj });
        if obj < best_obj {
            best_obj = obj;
            best_v.copy_from_slice(&v);
            best_index = t;
        }
        if best_obj < reference - cfg.epsilon / 10.0 {
            reference = best_obj;
            last_gain = t;
        } else if t - last_gain >= cfg.patience {
            break;
        }
        if t == cfg.max_iters {
            break;
        }
        logs.clear();
        logs.push(ly);
        for l in 0..d {
            let step = eta * gamma * grad[l];
            lw_plus[l] -= step;
            lw_minus[l] += step;
            logs.push(lw_plus[l]);
            logs.push(lw_minus[l]);
        }
        let lz = crate::math::log_sum_exp(&logs);
        for l in 0..d {
            lw_plus[l] -= lz;
            lw_minus[l] -= lz;
        }
        ly -= lz;
        eta *= sqrt(t as f64 / (t + 1) as f64);
    }
    let unconstrained = VertexParameter::new(f.node, f.p, f.k, best_v)?;
    let (vertex, objective) = match cfg.projection {
        Some(pr) => {
            let pv = project_to_feasible(&unconstrained, pr.theta_min, pr.theta_max);
            let o = f.value(pv.values());
            (pv, o)
        }
        None => (unconstrained.clone(), best_obj),
    };
    Ok(GriseSolution {
        vertex,
        objective,
        unconstrained,
        unconstrained_objective: best_obj,
        iterations_used: used,
        best_iterate_index: best_index,
    })
}

/// Coordinatewise projection onto `Λ`: clamp to `θ_max`, zero below `θ_min/2`, lift to `θ_min` otherwise.
pub fn project_to_feasible(v: &VertexParameter, theta_min: f64, theta_max: f64) -> VertexParameter {
    let mut out = v.clone();
    for x in out.values_mut() {
        let a = x.abs();
        *x = if a < theta_min / 2.0 {
            0.0
        } else if a < theta_min {
            theta_min.copysign(*x)
        } else {
            a.min(theta_max).copysign(*x)
        };
    }
    out
}

/// One solve per node, in node order.
pub fn fit_all_nodes(space: &FeatureSpace, samples: &SampleMatrix, cfg: &GriseConfig) -> Result<Vec<GriseSolution>> {
    (0..space.p()).map(|i| entropic_descent(space, samples, i, cfg)).collect()
}
