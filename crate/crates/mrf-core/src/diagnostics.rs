//! Quadrature oracles and theory constants: population GISO, sandwich and Fisher
//! matrices, Condition-1 checks, `κ` closed forms and sample-complexity constants.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::error::{config, numeric, Error, Result};
use crate::grise::{entropic_descent_on, GriseConfig, NodeFeatures};
use crate::linalg::{condition_number, inverse, matmul, symmetric_eigenvalues};
use crate::math::{exp, ln, log_sum_exp, powf, powi, sqrt};
use crate::model::{FeatureSpace, ModelSpec};
use crate::quadrature::Rule;
use crate::sampler::{gibbs_sample, SamplerConfig};

/// Largest `p` handled by tensor-product quadrature.
pub const MAX_TENSOR_P: usize = 3;

/// Default per-axis node count for tensor quadrature.
pub const DEFAULT_TENSOR_NODES: usize = 64;

/// Tensor-product quadrature points weighted by the normalised model density.
#[derive(Debug, Clone)]
pub struct PopulationGrid {
    p: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl PopulationGrid {
    pub fn new(model: &ModelSpec, nodes: usize) -> Result<Self> {
        let p = model.p();
        if p > MAX_TENSOR_P || p == 0 {
            return Err(Error::Capability(format!("tensor quadrature supports 1 ≤ p ≤ {MAX_TENSOR_P}, got {p}")));
        }
        let rules: Vec<Rule> = model.domain().intervals().iter().map(|iv| Rule::composite(iv.l, iv.u, nodes)).collect();
        let m = rules[0].len();
        let total = powi(m as f64, p as u32) as usize;
        let mut points = Vec::with_capacity(total * p);
        let mut logw = Vec::with_capacity(total);
        let mut x = vec![0.0; p];
        for idx in 0..total {
            let mut rem = idx;
            let mut lw = 0.0;
            for (a, rule) in rules.iter().enumerate() {
                let q = rem % m;
                rem /= m;
                x[a] = rule.nodes[q];
                lw += ln(rule.weights[q]);
            }
            logw.push(lw + model.energy_unchecked(&x));
            points.extend_from_slice(&x);
        }
        let lz = log_sum_exp(&logw);
        let weights: Vec<f64> = logw.iter().map(|l| exp(l - lz)).collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(numeric("population weights are not finite"));
        }
        Ok(Self { p, points, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q * self.p..(q + 1) * self.p]
    }

    pub fn weight(&self, q: usize) -> f64 {
        self.weights[q]
    }

    /// Features of node `i` at every grid point.
    pub fn features(&self, space: &FeatureSpace, i: usize) -> Vec<f64> {
        let dim = space.dim();
        let mut out = vec![0.0; self.len() * dim];
        let mut scratch = vec![0.0; space.p() * space.k()];
        for q in 0..self.len() {
            space.feature_into(i, self.point(q), &mut out[q * dim..(q + 1) * dim], &mut scratch);
        }
        out
    }
}

/// `E[exp(−v·φ^(i)(x))]` under the model.
pub fn population_giso(model: &ModelSpec, i: usize, v: &[f64], nodes: usize) -> Result<f64> {
    Ok(population_giso_and_gradient(model, i, v, nodes)?.0)
}

/// Population GISO and its gradient `−E[φ^(i) exp(−v·φ^(i))]`.
pub fn population_giso_and_gradient(model: &ModelSpec, i: usize, v: &[f64], nodes: usize) -> Result<(f64, Vec<f64>)> {
    let grid = PopulationGrid::new(model, nodes)?;
    let dim = model.space().dim();
    if v.len() != dim {
        return Err(Error::Shape(format!("vertex has {} entries, expected {dim}", v.len())));
    }
    let feats = grid.features(model.space(), i);
    let mut val = 0.0;
    let mut grad = vec![0.0; dim];
    for q in 0..grid.len() {
        let f = &feats[q * dim..(q + 1) * dim];
        let e = grid.weight(q) * exp(-v.iter().zip(f).map(|(a, b)| a * b).sum::<f64>());
        val += e;
        for (g, fl) in grad.iter_mut().zip(f) {
            *g -= e * fl;
        }
    }
    Ok((val, grad))
}

/// Covariances entering the asymptotic law of the estimator for one node.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBundle {
    pub dim: usize,
    /// `Cov(φ^(i) e^{−ϑ*·φ^(i)})`.
    pub a: Vec<f64>,
    /// `Cov(φ^(i), φ^(i) e^{−ϑ*·φ^(i)})`.
    pub b: Vec<f64>,
    /// `B⁻¹AB⁻¹`, present when `B` is well conditioned.
    pub sandwich: Option<Vec<f64>>,
    /// Fisher information `Cov(φ^(i))`.
    pub fisher: Vec<f64>,
    pub fisher_inverse: Option<Vec<f64>>,
    pub b_condition: f64,
}

/// `A`, `B`, `J` and the sandwich for node `i` by tensor quadrature.
pub fn covariance_bundle(model: &ModelSpec, i: usize, nodes: usize) -> Result<CovarianceBundle> {
    let grid = PopulationGrid::new(model, nodes)?;
    let space = model.space();
    let dim = space.dim();
    let theta = model.vertex_parameter(i);
    let feats = grid.features(space, i);
    let mut m_phi = vec![0.0; dim];
    let mut m_g = vec![0.0; dim];
    let mut gg = vec![0.0; dim * dim];
    let mut pg = vec![0.0; dim * dim];
    let mut pp = vec![0.0; dim * dim];
    for q in 0..grid.len() {
        let f = &feats[q * dim..(q + 1) * dim];
        let w = grid.weight(q);
        let e = exp(-theta.dot(f));
        for a in 0..dim {
            m_phi[a] += w * f[a];
            m_g[a] += w * f[a] * e;
            for b in 0..dim {
                gg[a * dim + b] += w * f[a] * f[b] * e * e;
                pg[a * dim + b] += w * f[a] * f[b] * e;
                pp[a * dim + b] += w * f[a] * f[b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..dim {
            gg[a * dim + b] -= m_g[a] * m_g[b];
            pg[a * dim + b] -= m_phi[a] * m_g[b];
            pp[a * dim + b] -= m_phi[a] * m_phi[b];
        }
    }
    let b_condition = condition_number(&pg, dim);
    let sandwich = if b_condition < 1e12 {
        inverse(&pg, dim).map(|binv| matmul(&matmul(&binv, &gg, dim), &binv, dim))
    } else {
        None
    };
    let fisher_inverse = inverse(&pp, dim);
    Ok(CovarianceBundle { dim, a: gg, b: pg, sandwich, fisher: pp, fisher_inverse, b_condition })
}

/// Example distributions with closed-form Condition-1 constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaExample {
    /// Linear pairwise model, `φ(x) = x`.
    LinearS1,
    /// Harmonic pairs with restricted interactions.
    HarmonicS2,
    /// Degree-two polynomial.
    PolyDeg2S3,
    /// Polynomial with products of degree-two terms.
    PolyProdS4,
}

impl core::str::FromStr for KappaExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" | "s1" | "linear" => Ok(Self::LinearS1),
            "S2" | "s2" | "harmonic" => Ok(Self::HarmonicS2),
            "S3" | "s3" | "poly2" => Ok(Self::PolyDeg2S3),
            "S4" | "s4" | "polyprod" => Ok(Self::PolyProdS4),
            other => Err(config(format!("unknown kappa example {other:?}"))),
        }
    }
}

/// Closed-form `κ` for the example family on `[−b, b]` with degree `d`.
pub fn kappa_closed_form(example: KappaExample, b: f64, d: usize, theta_max: f64) -> Result<f64> {
    if !(b > 0.0) || d == 0 || !(theta_max >= 0.0) {
        return Err(config("kappa needs b > 0, d ≥ 1 and theta_max ≥ 0"));
    }
    let d = d as f64;
    let s = 1.0 + 2.0 * b;
    Ok(match example {
        KappaExample::LinearS1 => 4.0 * powi(b, 4) / 3.0 * exp(-6.0 * theta_max * (d + 1.0) * s * b.max(b * b)),
        KappaExample::HarmonicS2 => {
            let g = 2.0 * theta_max * (4.0 * d + 2.0) * s;
            powf(PI * exp(-g) / 2.0, 2.0 * exp(g))
        }
        KappaExample::PolyDeg2S3 => {
            let m = b.max(powi(b, 4));
            16.0 * powi(b, 4) * (45.0 / 12.0f64).min(b * b) / 45.0 * exp(-6.0 * theta_max * (4.0 * d + 2.0) * s * m)
        }
        KappaExample::PolyProdS4 => {
            let g = 2.0 * theta_max * (4.0 * d + 2.0) * s * b.max(powi(b, 4));
            let lead = E * (15.0 * b + 4.0 * powi(b, 3)) / (45.0 * s);
            lead * powf(b * s * exp(-g) / E, s / b * exp(g) + 1.0)
        }
    })
}

/// Grid size of the inner entropy integral.
pub const ENTROPY_GRID: usize = 2048;

/// `E[exp{2h(Δ·ψ^(i)(x_i, x_j) | x_{−j})}]` for a two-variable model, `Δ = θ̄ − θ̃`
/// given as row-major `k × k` blocks with rows indexing node `i`.
pub fn condition1_lhs_quadrature(model: &ModelSpec, i: usize, j: usize, theta_bar: &[f64], theta_tilde: &[f64]) -> Result<f64> {
    if model.p() != 2 {
        return Err(Error::Capability(format!("Condition-1 quadrature needs p = 2, got {}", model.p())));
    }
    let k = model.k();
    if i == j || i > 1 || j > 1 || theta_bar.len() != k * k || theta_tilde.len() != k * k {
        return Err(Error::Shape("Condition-1 inputs have inconsistent shapes".into()));
    }
    let delta: Vec<f64> = theta_bar.iter().zip(theta_tilde).map(|(a, b)| a - b).collect();
    if delta.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let space = model.space();
    let basis = model.basis();
    let (iv_i, iv_j) = (model.domain().interval(i), model.domain().interval(j));
    let outer = Rule::composite(iv_i.l, iv_i.u, 256);
    let h = iv_j.len() / ENTROPY_GRID as f64;
    let grid: Vec<f64> = (0..ENTROPY_GRID).map(|q| iv_j.l + (q as f64 + 0.5) * h).collect();
    let mut phi = vec![0.0; k];
    let mut dphi = vec![0.0; k];
    let mut x = vec![0.0; 2];
    let mut log_marg = Vec::with_capacity(outer.len());
    let mut entropies = Vec::with_capacity(outer.len());
    for (&xi, &wi) in outer.nodes.iter().zip(&outer.weights) {
        x[i] = xi;
        let lam = model.conditional_canonical_unchecked(j, &x);
        let cen = space.centered_basis(i, xi)?;
        let a: Vec<f64> = (0..k).map(|s| (0..k).map(|r| delta[r * k + s] * cen[r]).sum()).collect();
        // Marginal weight of x_i: ∫ exp(energy) dx_j, up to a constant.
        let energies: Vec<f64> = grid
            .iter()
            .map(|&xj| {
                x[j] = xj;
                model.energy_unchecked(&x)
            })
            .collect();
        log_marg.push(ln(wi) + ln(h) + log_sum_exp(&energies));
        if a.iter().all(|&v| v == 0.0) {
            entropies.push(f64::NEG_INFINITY);
            continue;
        }
        let lz = ln(h) + log_sum_exp(
            &grid
                .iter()
                .map(|&xj| {
                    basis.eval_into(xj, &mut phi);
                    lam.iter().zip(&phi).map(|(p, q)| p * q).sum()
                })
                .collect::<Vec<f64>>(),
        );
        let dens = |xj: f64, phi: &mut [f64]| -> f64 {
            basis.eval_into(xj, phi);
            exp(lam.iter().zip(phi.iter()).map(|(p, q)| p * q).sum::<f64>() - lz)
        };
        let g = |xj: f64, phi: &mut [f64]| -> f64 {
            basis.eval_into(xj, phi);
            a.iter().zip(phi.iter()).map(|(p, q)| p * q).sum()
        };
        let dg = |xj: f64, d: &mut [f64]| -> f64 {
            basis.derivative_into(xj, d);
            a.iter().zip(d.iter()).map(|(p, q)| p * q).sum()
        };
        entropies.push(transformed_entropy(&grid, h, &dens, &g, &dg, &mut phi, &mut dphi));
    }
    let lzm = log_sum_exp(&log_marg);
    let mut lhs = 0.0;
    for (lm, hy) in log_marg.iter().zip(&entropies) {
        if hy.is_finite() {
            lhs += exp(lm - lzm + 2.0 * hy);
        }
    }
    if !lhs.is_finite() {
        return Err(numeric("Condition-1 quadrature is not finite"));
    }
    Ok(lhs)
}

/// Differential entropy of `Y = g(X)` for `X` with density `dens` on a midpoint grid,
/// via the change of variables over monotone pieces of `g`.
fn transformed_entropy(
    grid: &[f64],
    h: f64,
    dens: &dyn Fn(f64, &mut [f64]) -> f64,
    g: &dyn Fn(f64, &mut [f64]) -> f64,
    dg: &dyn Fn(f64, &mut [f64]) -> f64,
    phi: &mut [f64],
    dphi: &mut [f64],
) -> f64 {
    let m = grid.len();
    let fx: Vec<f64> = grid.iter().map(|&x| dens(x, phi)).collect();
    let gx: Vec<f64> = grid.iter().map(|&x| g(x, phi)).collect();
    let dx: Vec<f64> = grid.iter().map(|&x| dg(x, dphi)).collect();
    // Split the grid into maximal runs where g' keeps its sign.
    let mut pieces: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for q in 1..m {
        if (dx[q] > 0.0) != (dx[q - 1] > 0.0) {
            pieces.push((start, q));
            start = q;
        }
    }
    pieces.push((start, m));
    if pieces.len() == 1 {
        let hx: f64 = -fx.iter().map(|f| if *f > 0.0 { f * ln(*f) } else { 0.0 }).sum::<f64>() * h;
        let jac: f64 = fx.iter().zip(&dx).map(|(f, d)| f * ln(d.abs())).sum::<f64>() * h;
        return hx + jac;
    }
    let ranges: Vec<(f64, f64)> = pieces
        .iter()
        .map(|&(s, e)| {
            let (a, b) = (gx[s], gx[e - 1]);
            (a.min(b), a.max(b))
        })
        .collect();
    let mut acc = 0.0;
    for (pi, &(s, e)) in pieces.iter().enumerate() {
        for q in s..e {
            let y = gx[q];
            let mut fy = fx[q] / dx[q].abs();
            for (qi, &(s2, e2)) in pieces.iter().enumerate() {
                if qi == pi || y < ranges[qi].0 || y > ranges[qi].1 {
                    continue;
                }
                if let Some(xq) = invert_piece(grid, &gx, s2, e2, y, g, phi) {
                    let d = dg(xq, dphi).abs();
                    if d > 0.0 {
                        fy += dens(xq, phi) / d;
                    }
                }
            }
            if fy > 0.0 && fx[q] > 0.0 {
                acc -= fx[q] * ln(fy) * h;
            }
        }
    }
    acc
}

/// Solves `g(x) = y` on a monotone piece by bracketing on the grid and bisection.
fn invert_piece(grid: &[f64], gx: &[f64], s: usize, e: usize, y: f64, g: &dyn Fn(f64, &mut [f64]) -> f64, phi: &mut [f64]) -> Option<f64> {
    let increasing = gx[e - 1] >= gx[s];
    let key = |q: usize| if increasing { gx[q] } else { -gx[q] };
    let target = if increasing { y } else { -y };
    let pos = (s..e).collect::<Vec<_>>().partition_point(|&q| key(q) < target) + s;
    let (mut lo, mut hi) = if pos == s {
        (grid[s] - 0.5 * (grid[1] - grid[0]), grid[s])
    } else if pos == e {
        (grid[e - 1], grid[e - 1] + 0.5 * (grid[1] - grid[0]))
    } else {
        (grid[pos - 1], grid[pos])
    };
    let f = |x: f64, phi: &mut [f64]| if increasing { g(x, phi) - y } else { y - g(x, phi) };
    if f(lo, phi) > 0.0 || f(hi, phi) < 0.0 {
        return None;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid, phi) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Model quantities entering the sample-complexity constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSummary {
    pub k: usize,
    pub d: usize,
    pub theta_max: f64,
    pub phi_max: f64,
    pub phi_bar_max: f64,
    pub b_u: f64,
    pub kappa: f64,
    pub q_s: f64,
}

impl ModelSummary {
    /// Summary of `model` with the supplied `κ` and `q^s`.
    pub fn of(model: &ModelSpec, kappa: f64, q_s: f64) -> Self {
        Self {
            k: model.k(),
            d: model.d(),
            theta_max: model.theta_max(),
            phi_max: model.space().phi_max(),
            phi_bar_max: model.space().phi_bar_max(),
            b_u: model.domain().b_u(),
            kappa,
            q_s,
        }
    }

    /// `γ = θ_max(k + k²d)`.
    pub fn gamma(&self) -> f64 {
        let k = self.k as f64;
        self.theta_max * (k + k * k * self.d as f64)
    }

    /// `φ_max^(c) = max{1 + b_u, 2}·max{φ_max, φ_max²}`.
    pub fn varphi_max(&self) -> f64 {
        (1.0 + self.b_u).max(2.0) * self.phi_max.max(self.phi_max * self.phi_max)
    }
}

/// Sample-complexity constants at one `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleComplexityConstants {
    pub alpha: f64,
    pub gamma: f64,
    pub varphi_max: f64,
    pub kappa: f64,
    pub q_s: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `ln c2`, finite even when `c2` overflows.
    pub ln_c2: f64,
}

/// Evaluates `c1(α)`, `c2(α)` and `c3(α)`.
pub fn complexity_constants(s: &ModelSummary, alpha: f64) -> Result<SampleComplexityConstants> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(config("alpha must lie in (0, 1)"));
    }
    if !(s.kappa > 0.0) {
        return Err(config("kappa must be positive"));
    }
    if !(s.q_s > 0.0) {
        return Err(config("q_s must be positive"));
    }
    let g = s.gamma();
    let vp = s.varphi_max();
    let gv = g * vp;
    let d = s.d as f64;
    let k = s.k as f64;
    let c1 = 16.0 * PI * PI * E * E * (d + 1.0) * (d + 1.0) * g * g * vp * vp * (1.0 + gv) * (1.0 + gv) * exp(4.0 * gv)
        / (s.kappa * s.kappa * powi(alpha, 4));
    let ln_c2 = (37.0 * d + 73.0) * ln(2.0)
        + 2.0 * d * ln(s.b_u)
        + (12.0 * d + 16.0) * ln(k)
        + (6.0 * d + 9.0) * ln(d)
        + (6.0 * d + 8.0) * ln(s.theta_max)
        + (8.0 * d + 12.0) * ln(s.phi_max)
        + 2.0 * d * ln(s.phi_bar_max)
        - (8.0 * d + 16.0) * ln(alpha)
        - (4.0 * d + 8.0) * ln(s.q_s);
    let c3 = k * k * powi(d, 4) * powi(gv, 8) * exp(8.0 * gv) / (powi(s.kappa, 4) * powi(alpha, 8));
    Ok(SampleComplexityConstants { alpha, gamma: g, varphi_max: vp, kappa: s.kappa, q_s: s.q_s, c1, c2: exp(ln_c2), c3, ln_c2 })
}

/// Seed of replication `r` in a study seeded with `seed`.
pub fn replication_seed(seed: u64, r: usize) -> u64 {
    let mut z = seed ^ (r as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Settings of a normality or consistency study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub node: usize,
    pub sampler: SamplerConfig,
    pub grise: GriseConfig,
}

/// `√n(ϑ̂ − ϑ*)` for one replication, using the unprojected estimate.
pub fn normality_replication(model: &ModelSpec, n: usize, r: usize, seed: u64, cfg: &StudyConfig) -> Result<Vec<f64>> {
    let err = estimation_error(model, n, replication_seed(seed, r), cfg)?;
    let s = sqrt(n as f64);
    Ok(err.iter().map(|e| s * e).collect())
}

/// `ϑ̂ − ϑ*` for node `cfg.node` from `n` fresh samples drawn with `seed`.
pub fn estimation_error(model: &ModelSpec, n: usize, seed: u64, cfg: &StudyConfig) -> Result<Vec<f64>> {
    let mut sc = cfg.sampler;
    sc.seed = seed;
    let samples = gibbs_sample(model, n, &sc)?;
    let f = NodeFeatures::build(model.space(), &samples, cfg.node)?;
    let sol = entropic_descent_on(&f, model.space().varphi_max(), &cfg.grise, |_| {})?;
    let truth = model.vertex_parameter(cfg.node);
    Ok(sol.unconstrained.values().iter().zip(truth.values()).map(|(a, b)| a - b).collect())
}

/// Empirical mean and covariance of scaled errors, compared with a reference covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalityReport {
    pub replications: usize,
    pub mean: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub covariance: Vec<f64>,
    pub reference: Option<Vec<f64>>,
    /// `|cov_ll − ref_ll| / ref_ll` for each diagonal entry.
    pub relative_diagonal_error: Vec<f64>,
}

/// Summarises scaled error vectors against `reference` (row-major).
pub fn summarize_normality(errors: &[Vec<f64>], reference: Option<&[f64]>) -> NormalityReport {
    let r = errors.len();
    let dim = errors.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; dim];
    for e in errors {
        for (m, v) in mean.iter_mut().zip(e) {
            *m += v / r as f64;
        }
    }
    let mut cov = vec![0.0; dim * dim];
    for e in errors {
        for a in 0..dim {
            for b in 0..dim {
                cov[a * dim + b] += (e[a] - mean[a]) * (e[b] - mean[b]) / (r as f64 - 1.0).max(1.0);
            }
        }
    }
    let standard_errors = (0..dim).map(|a| sqrt(cov[a * dim + a] / r as f64)).collect();
    let relative_diagonal_error = match reference {
        Some(rf) => (0..dim).map(|a| (cov[a * dim + a] - rf[a * dim + a]).abs() / rf[a * dim + a]).collect(),
        None => Vec::new(),
    };
    NormalityReport { replications: r, mean, standard_errors, covariance: cov, reference: reference.map(<[f64]>::to_vec), relative_diagonal_error }
}

/// Sequential normality study: `replications` independent fits of node `cfg.node`.
pub fn normality_study(model: &ModelSpec, n: usize, replications: usize, seed: u64, cfg: &StudyConfig) -> Result<NormalityReport> {
    if model.p() != 2 {
        return Err(Error::Capability("normality study needs p = 2".into()));
    }
    let errors: Vec<Vec<f64>> = (0..replications).map(|r| normality_replication(model, n, r, seed, cfg)).collect::<Result<_>>()?;
    let bundle = covariance_bundle(model, cfg.node, DEFAULT_TENSOR_NODES)?;
    Ok(summarize_normality(&errors, bundle.sandwich.as_deref()))
}

/// Smallest eigenvalue of a symmetric row-major matrix.
pub fn min_eigenvalue(a: &[f64], n: usize) -> f64 {
    symmetric_eigenvalues(a, n)[0]
}
