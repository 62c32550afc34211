//! Gauss–Legendre rules and composite rules on finite intervals.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{cos, powi};

/// Order of each panel in a composite rule.
pub const PANEL_ORDER: usize = 16;

/// Default node count for one-dimensional integrals.
pub const DEFAULT_NODES: usize = 256;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule of the given order, nodes found by Newton iteration on `P_n`.
    pub fn new(order: usize) -> Self {
        let n = order.max(1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of a quadrature rule on `[a, b]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss–Legendre rule with at least `nodes` points, panels of order
    /// [`PANEL_ORDER`] (a single panel when `nodes` is smaller).
    pub fn composite(a: f64, b: f64, nodes: usize) -> Self {
        let order = nodes.clamp(1, PANEL_ORDER);
        let panels = nodes.div_ceil(order).max(1);
        let base = GaussLegendre::new(order);
        let h = (b - a) / panels as f64;
        let mut out_nodes = Vec::with_capacity(panels * order);
        let mut out_weights = Vec::with_capacity(panels * order);
        for q in 0..panels {
            let lo = a + q as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                out_nodes.push(mid + 0.5 * h * x);
                out_weights.push(0.5 * h * w);
            }
        }
        Self { nodes: out_nodes, weights: out_weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True for a rule without nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f` over the rule's interval.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Exactness check helper: `∫_a^b x^m dx` in closed form.
pub fn monomial_integral(a: f64, b: f64, m: u32) -> f64 {
    (powi(b, m + 1) - powi(a, m + 1)) / (m + 1) as f64
}
