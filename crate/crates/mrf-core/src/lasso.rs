//! `ℓ1`-constrained least squares solved by away-step Frank–Wolfe.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, numeric, shape, Result};

/// `min ‖y − Vβ‖² s.t. ‖β‖₁ ≤ c̃2` with a sparse 0/1 design.
#[derive(Debug, Clone)]
pub struct LassoProblem {
    cols: usize,
    /// Column indices of the ones in each row.
    rows: Vec<Vec<u32>>,
    response: Vec<f64>,
    l1_radius: f64,
}

impl LassoProblem {
    pub fn new(cols: usize, rows: Vec<Vec<u32>>, response: Vec<f64>, l1_radius: f64) -> Result<Self> {
        if rows.len() != response.len() {
            return Err(shape("design and response lengths differ"));
        }
        if !(l1_radius > 0.0 && l1_radius.is_finite()) {
            return Err(config("l1 radius must be positive"));
        }
        if rows.iter().flatten().any(|&c| c as usize >= cols) {
            return Err(shape("design column index out of range"));
        }
        if response.iter().any(|y| !y.is_finite()) {
            return Err(numeric("non-finite response"));
        }
        Ok(Self { cols, rows, response, l1_radius })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn l1_radius(&self) -> f64 {
        self.l1_radius
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// `Vβ` for every row.
    pub fn predict(&self, beta: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&c| beta[c as usize]).sum()).collect()
    }

    /// `(1/n)‖y − Vβ‖²`.
    pub fn mean_squared_residual(&self, beta: &[f64]) -> f64 {
        let pred = self.predict(beta);
        pred.iter().zip(&self.response).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / self.n().max(1) as f64
    }
}

/// Solver output and telemetry.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoSolution {
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub duality_gap: f64,
}

/// Sparse symmetric Gram matrix `VᵀV` stored by column.
struct Gram {
    cols: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
}

impl Gram {
    fn new(problem: &LassoProblem) -> Self {
        let mut maps: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); problem.cols];
        for row in &problem.rows {
            for &a in row {
                for &b in row {
                    *maps[a as usize].entry(b).or_insert(0.0) += 1.0;
                }
            }
        }
        let diag = maps.iter().enumerate().map(|(j, m)| m.get(&(j as u32)).copied().unwrap_or(0.0)).collect();
        let cols = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        Self { cols, diag }
    }
}

/// Iterations between exact recomputations of `VᵀVβ`, bounding rounding drift.
const RESYNC_EVERY: usize = 1000;

fn gram_times(gram: &Gram, beta: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            axpy_column(gram, j, b, out);
        }
    }
}

/// Atom `sign·c̃2·e_j` encoded as `2j + (sign < 0)`.
#[inline]
fn atom(j: usize, negative: bool) -> usize {
    2 * j + negative as usize
}

/// Solves the problem to duality gap `≤ tol` (absolute) or `max_iters` iterations.
///
/// Iterates stay convex combinations of the `2p̃` vertices `±c̃2 e_j`, so
/// `‖β‖₁ ≤ c̃2` holds at every step; away steps give linear convergence
/// when the optimum is interior.
pub fn robust_lasso(problem: &LassoProblem, max_iters: usize, tol: f64) -> Result<LassoSolution> {
    let p = problem.cols;
    let c = problem.l1_radius;
    if p == 0 {
        return Ok(LassoSolution { beta: Vec::new(), iterations: 0, duality_gap: 0.0 });
    }
    let gram = Gram::new(problem);
    let mut vty = vec![0.0; p];
    for (row, &y) in problem.rows.iter().zip(&problem.response) {
        for &j in row {
            vty[j as usize] += y;
        }
    }
    // Start at the vertex chosen by the first linear minimisation at β = 0.
    let (j0, neg0) = lmo(&vty.iter().map(|v| -2.0 * v).collect::<Vec<_>>());
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    weights.insert(atom(j0, neg0), 1.0);
    let mut beta = vec![0.0; p];
    beta[j0] = if neg0 { -c } else { c };
    let mut gb = vec![0.0; p];
    axpy_column(&gram, j0, beta[j0], &mut gb);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut grad = vec![0.0; p];
    for it in 0..max_iters {
        iterations = it + 1;
        if it % RESYNC_EVERY == RESYNC_EVERY - 1 {
            gram_times(&gram, &beta, &mut gb);
        }
        for j in 0..p {
            grad[j] = 2.0 * (gb[j] - vty[j]);
        }
        let (js, negs) = lmo(&grad);
        let s_val = if negs { -c } else { c };
        let g_beta: f64 = grad.iter().zip(&beta).map(|(a, b)| a * b).sum();
        gap = g_beta - grad[js] * s_val;
        if gap <= tol {
            break;
        }
        // Away vertex: active atom with the largest gradient inner product.
        let (away, away_w) = weights
            .iter()
            .map(|(&a, &w)| (a, w))
            .max_by(|x, y| atom_dot(&grad, x.0, c).total_cmp(&atom_dot(&grad, y.0, c)))
            .expect("active set is never empty");
        let away_gap = atom_dot(&grad, away, c) - g_beta;
        let beta_gb: f64 = beta.iter().zip(&gb).map(|(a, b)| a * b).sum();
        if gap >= away_gap || away_w >= 1.0 {
            // Frank–Wolfe direction d = s − β.
            let sgs = s_val * s_val * gram.diag[js];
            let sgb = s_val * gb[js];
            let curv = sgs - 2.0 * sgb + beta_gb;
            let slope = grad[js] * s_val - g_beta;
            let step = if curv > 0.0 { (-slope / (2.0 * curv)).clamp(0.0, 1.0) } else { 1.0 };
            if step <= 0.0 {
                break;
            }
            for b in beta.iter_mut() {
                *b *= 1.0 - step;
            }
            beta[js] += step * s_val;
            for g in gb.iter_mut() {
                *g *= 1.0 - step;
            }
            axpy_column(&gram, js, step * s_val, &mut gb);
            for w in weights.values_mut() {
                *w *= 1.0 - step;
            }
            *weights.entry(atom(js, negs)).or_insert(0.0) += step;
            if step >= 1.0 {
                weights.clear();
                weights.insert(atom(js, negs), 1.0);
            }
        } else {
            // Away direction d = β − a.
            let ja = away / 2;
            let a_val = if away % 2 == 1 { -c } else { c };
            let aga = a_val * a_val * gram.diag[ja];
            let agb = a_val * gb[ja];
            let curv = beta_gb - 2.0 * agb + aga;
            let slope = g_beta - grad[ja] * a_val;
            let max_step = away_w / (1.0 - away_w);
            let step = if curv > 0.0 { (-slope / (2.0 * curv)).clamp(0.0, max_step) } else { max_step };
            if step <= 0.0 {
                break;
            }
            for b in beta.iter_mut() {
                *b *= 1.0 + step;
            }
            beta[ja] -= step * a_val;
            for g in gb.iter_mut() {
                *g *= 1.0 + step;
            }
            axpy_column(&gram, ja, -step * a_val, &mut gb);
            for w in weights.values_mut() {
                *w *= 1.0 + step;
            }
            let wa = weights.get_mut(&away).expect("away atom is active");
            *wa -= step;
            if step >= max_step || *wa <= 0.0 {
                weights.remove(&away);
            }
        }
    }
    clip_to_ball(&mut beta, c);
    Ok(LassoSolution { beta, iterations, duality_gap: gap })
}

/// Coordinate and sign of the `ℓ1`-ball vertex minimising `⟨grad, s⟩`.
fn lmo(grad: &[f64]) -> (usize, bool) {
    let mut best = 0;
    for j in 1..grad.len() {
        if grad[j].abs() > grad[best].abs() {
            best = j;
        }
    }
    (best, grad[best] > 0.0)
}

fn atom_dot(grad: &[f64], a: usize, c: f64) -> f64 {
    let v = if a % 2 == 1 { -c } else { c };
    grad[a / 2] * v
}

fn axpy_column(gram: &Gram, j: usize, scale: f64, out: &mut [f64]) {
    for &(r, g) in &gram.cols[j] {
        out[r as usize] += scale * g;
    }
}

/// Rescales away rounding drift so that `‖β‖₁ ≤ c` holds exactly.
fn clip_to_ball(beta: &mut [f64], c: f64) {
    let norm: f64 = beta.iter().map(|b| b.abs()).sum();
    if norm > c {
        let s = c / norm;
        for b in beta.iter_mut() {
            *b *= s;
        }
        while beta.iter().map(|b| b.abs()).sum::<f64>() > c {
            for b in beta.iter_mut() {
                *b *= 1.0 - f64::EPSILON;
            }
        }
    }
}
