//! Basis families, domains, pairwise densities and locally centered features.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{config, numeric, shape, Error, Result};
use crate::math::{cos, exp, powi, sin};
use crate::quadrature::Rule;
use crate::structure::EdgeSet;

/// Kind of sufficient statistics attached to each variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `φ_r(x) = x^r`, `r = 1..k`.
    Polynomial,
    /// `(sin(rπx/b), cos(rπx/b))` for `r = 1..k/2`.
    Harmonic,
}

/// Basis kind and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisFamily {
    pub kind: BasisKind,
    pub k: usize,
}

impl BasisFamily {
    /// Validated family; harmonic families need an even `k`.
    pub fn new(kind: BasisKind, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(config("basis dimension k must be positive"));
        }
        if kind == BasisKind::Harmonic && k % 2 != 0 {
            return Err(config("harmonic basis needs an even k"));
        }
        Ok(Self { kind, k })
    }
}

/// A basis family instantiated on `[-b, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    family: BasisFamily,
    b: f64,
}

impl Basis {
    /// Basis on the symmetric range `[-b, b]`.
    pub fn new(family: BasisFamily, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(config("basis radius b must be positive and finite"));
        }
        Ok(Self { family, b })
    }

    /// Polynomial basis of degree `k` on `[-b, b]`.
    pub fn polynomial(k: usize, b: f64) -> Result<Self> {
        Self::new(BasisFamily::new(BasisKind::Polynomial, k)?, b)
    }

    /// Harmonic basis with `k/2` frequencies on `[-b, b]`.
    pub fn harmonic(k: usize, b: f64) -> Result<Self> {
        Self::new(BasisFamily::new(BasisKind::Harmonic, k)?, b)
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn k(&self) -> usize {
        self.family.k
    }

    pub fn radius(&self) -> f64 {
        self.b
    }

    /// Uniform bound on `|φ_r|` over `[-b, b]`.
    pub fn phi_max(&self) -> f64 {
        match self.family.kind {
            BasisKind::Polynomial => self.b.max(powi(self.b, self.family.k as u32)),
            BasisKind::Harmonic => 1.0,
        }
    }

    /// Uniform bound on `|dφ_r/dx|` over `[-b, b]`.
    pub fn phi_bar_max(&self) -> f64 {
        let k = self.family.k;
        match self.family.kind {
            BasisKind::Polynomial => (1..=k).map(|r| r as f64 * powi(self.b, r as u32 - 1)).fold(0.0, f64::max),
            BasisKind::Harmonic => (k / 2) as f64 * PI / self.b,
        }
    }

    /// Writes `φ(x)` into `out` (length `k`) without a range check.
    #[inline]
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        match self.family.kind {
            BasisKind::Polynomial => {
                let mut v = x;
                for o in out.iter_mut() {
                    *o = v;
                    v *= x;
                }
            }
            BasisKind::Harmonic => {
                let w = PI * x / self.b;
                for (r, pair) in out.chunks_exact_mut(2).enumerate() {
                    let a = (r + 1) as f64 * w;
                    pair[0] = sin(a);
                    pair[1] = cos(a);
                }
            }
        }
    }

    /// Writes `dφ(x)/dx` into `out`.
    pub fn derivative_into(&self, x: f64, out: &mut [f64]) {
        match self.family.kind {
            BasisKind::Polynomial => {
                let mut v = 1.0;
                for (r, o) in out.iter_mut().enumerate() {
                    *o = (r + 1) as f64 * v;
                    v *= x;
                }
            }
            BasisKind::Harmonic => {
                let w = PI / self.b;
                for (r, pair) in out.chunks_exact_mut(2).enumerate() {
                    let f = (r + 1) as f64 * w;
                    pair[0] = f * cos(f * x);
                    pair[1] = -f * sin(f * x);
                }
            }
        }
    }

    /// `φ(x)`, rejecting `x` outside `[-b, b]`.
    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        check_range(x, -self.b, self.b)?;
        let mut out = vec![0.0; self.k()];
        self.eval_into(x, &mut out);
        Ok(out)
    }

    /// `φ(x) ⊗ φ(y)` in row-major `(r, s)` order.
    pub fn eval_edge(&self, x: f64, y: f64) -> Result<Vec<f64>> {
        let fx = self.eval(x)?;
        let fy = self.eval(y)?;
        Ok(kron(&fx, &fy))
    }

    /// Uniform average of `φ` over `[l, u]`, in closed form.
    pub fn interval_mean(&self, l: f64, u: f64, out: &mut [f64]) {
        let len = u - l;
        match self.family.kind {
            BasisKind::Polynomial => {
                for (r, o) in out.iter_mut().enumerate() {
                    let m = r as u32 + 2;
                    *o = (powi(u, m) - powi(l, m)) / (m as f64 * len);
                }
            }
            BasisKind::Harmonic => {
                for (r, pair) in out.chunks_exact_mut(2).enumerate() {
                    let a = (r + 1) as f64 * PI / self.b;
                    pair[0] = (cos(a * l) - cos(a * u)) / (a * len);
                    pair[1] = (sin(a * u) - sin(a * l)) / (a * len);
                }
            }
        }
    }
}

/// Kronecker product of two vectors, `a` indexing rows.
pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

fn check_range(x: f64, lo: f64, hi: f64) -> Result<()> {
    if x >= lo && x <= hi {
        Ok(())
    } else {
        Err(Error::Domain { value: x, lo, hi })
    }
}

/// Closed interval `[l, u]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub l: f64,
    pub u: f64,
}

impl Interval {
    pub fn new(l: f64, u: f64) -> Result<Self> {
        if !(l.is_finite() && u.is_finite() && u > l) {
            return Err(config(format!("invalid interval [{l}, {u}]")));
        }
        Ok(Self { l, u })
    }

    pub fn len(&self) -> f64 {
        self.u - self.l
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.l && x <= self.u
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.l + self.u)
    }

    pub fn check(&self, x: f64) -> Result<()> {
        check_range(x, self.l, self.u)
    }
}

/// Per-variable intervals plus global bounds on their lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    intervals: Vec<Interval>,
    b_l: f64,
    b_u: f64,
}

impl Domain {
    /// Validated domain with `b_l ≤ u_i − l_i ≤ b_u` and `b_l > 0`.
    pub fn new(intervals: Vec<Interval>, b_l: f64, b_u: f64) -> Result<Self> {
        if !(b_l > 0.0 && b_u >= b_l && b_u.is_finite()) {
            return Err(config(format!("invalid length bounds b_l={b_l}, b_u={b_u}")));
        }
        for (i, iv) in intervals.iter().enumerate() {
            let len = iv.len();
            if !(len >= b_l && len <= b_u) {
                return Err(config(format!(
                    "interval {i} has length {len} outside [{b_l}, {b_u}]"
                )));
            }
        }
        Ok(Self { intervals, b_l, b_u })
    }

    /// `[-b, b]^p` with `b_l = b_u = 2b`.
    pub fn symmetric(p: usize, b: f64) -> Result<Self> {
        Self::new(vec![Interval::new(-b, b)?; p], 2.0 * b, 2.0 * b)
    }

    pub fn p(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, i: usize) -> Interval {
        self.intervals[i]
    }

    pub fn b_l(&self) -> f64 {
        self.b_l
    }

    pub fn b_u(&self) -> f64 {
        self.b_u
    }

    /// Smallest `b` with every interval inside `[-b, b]`.
    pub fn radius(&self) -> f64 {
        self.intervals.iter().fold(0.0, |m, iv| m.max(iv.l.abs()).max(iv.u.abs()))
    }

    /// Checks that `x` has length `p` and lies in the product of intervals.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p() {
            return Err(shape(format!("point has {} coordinates, expected {}", x.len(), self.p())));
        }
        for (iv, &v) in self.intervals.iter().zip(x) {
            iv.check(v)?;
        }
        Ok(())
    }
}

/// Basis and domain: everything needed to compute features, without parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    basis: Basis,
    domain: Domain,
    centers: Vec<f64>,
}

impl FeatureSpace {
    /// Binds a family to a domain; the basis radius is the domain radius.
    pub fn new(family: BasisFamily, domain: Domain) -> Result<Self> {
        let basis = Basis::new(family, domain.radius())?;
        let k = family.k;
        let mut centers = vec![0.0; domain.p() * k];
        for (i, iv) in domain.intervals().iter().enumerate() {
            basis.interval_mean(iv.l, iv.u, &mut centers[i * k..(i + 1) * k]);
        }
        Ok(Self { basis, domain, centers })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn p(&self) -> usize {
        self.domain.p()
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }

    /// Length `k + k²(p−1)` of a vertex parameter.
    pub fn dim(&self) -> usize {
        vertex_dim(self.p(), self.k())
    }

    /// Centering vector of node `i`: the uniform average of `φ` over `X_i`.
    pub fn center(&self, i: usize) -> &[f64] {
        let k = self.k();
        &self.centers[i * k..(i + 1) * k]
    }

    pub fn phi_max(&self) -> f64 {
        self.basis.phi_max()
    }

    pub fn phi_bar_max(&self) -> f64 {
        self.basis.phi_bar_max()
    }

    /// Bound on `‖φ^(i)(x)‖_∞`: `max{1 + b_u, 2}·max{φ_max, φ_max²}`.
    pub fn varphi_max(&self) -> f64 {
        let pm = self.phi_max();
        (1.0 + self.domain.b_u()).max(2.0) * pm.max(pm * pm)
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.p() {
            return Err(shape(format!("node {i} out of range for p={}", self.p())));
        }
        Ok(())
    }

    /// `φ(x) − c_i` with `c_i` the uniform average of `φ` over `X_i`.
    pub fn centered_basis(&self, i: usize, x: f64) -> Result<Vec<f64>> {
        self.check_node(i)?;
        self.domain.interval(i).check(x)?;
        let mut out = vec![0.0; self.k()];
        self.basis.eval_into(x, &mut out);
        for (o, c) in out.iter_mut().zip(self.center(i)) {
            *o -= c;
        }
        Ok(out)
    }

    /// `ψ(x, y)` centered in its first argument over `X_i`.
    pub fn centered_edge_basis(&self, i: usize, j: usize, x: f64, y: f64) -> Result<Vec<f64>> {
        self.check_node(j)?;
        let cx = self.centered_basis(i, x)?;
        self.domain.interval(j).check(y)?;
        let mut fy = vec![0.0; self.k()];
        self.basis.eval_into(y, &mut fy);
        Ok(kron(&cx, &fy))
    }

    /// Feature vector `φ^(i)(x)` in vertex-parameter layout.
    pub fn feature_vector(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_node(i)?;
        self.domain.check_point(x)?;
        let mut out = vec![0.0; self.dim()];
        let mut scratch = vec![0.0; self.p() * self.k()];
        self.feature_into(i, x, &mut out, &mut scratch);
        Ok(out)
    }

    /// Unchecked feature evaluation; `scratch` must hold `p·k` values.
    pub fn feature_into(&self, i: usize, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let k = self.k();
        for (j, &xj) in x.iter().enumerate() {
            self.basis.eval_into(xj, &mut scratch[j * k..(j + 1) * k]);
        }
        let (node, edges) = out.split_at_mut(k);
        for r in 0..k {
            node[r] = scratch[i * k + r] - self.centers[i * k + r];
        }
        let mut off = 0;
        for j in (0..x.len()).filter(|&j| j != i) {
            let fj = &scratch[j * k..(j + 1) * k];
            for r in 0..k {
                for s in 0..k {
                    edges[off + r * k + s] = node[r] * fj[s];
                }
            }
            off += k * k;
        }
    }
}

/// Length of a vertex parameter for `p` variables and basis dimension `k`.
pub fn vertex_dim(p: usize, k: usize) -> usize {
    k + k * k * p.saturating_sub(1)
}

/// A `k × k` interaction matrix, entry `(r, s)` multiplying `φ_r(x_i)φ_s(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBlock {
    k: usize,
    values: Vec<f64>,
}

impl EdgeBlock {
    /// Block from row-major values of length `k²`.
    pub fn new(k: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != k * k {
            return Err(shape(format!("edge block needs {} entries, got {}", k * k, values.len())));
        }
        Ok(Self { k, values })
    }

    /// Block from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let mut values = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(shape("edge block must be square"));
            }
            values.extend_from_slice(row);
        }
        Self::new(k, values)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.values[r * self.k + s]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.k).map(|c| c.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let k = self.k;
        let mut values = vec![0.0; k * k];
        for r in 0..k {
            for s in 0..k {
                values[s * k + r] = self.values[r * k + s];
            }
        }
        Self { k, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Stacked parameter vector of one node: node block then one `k²` block per other node.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexParameter {
    node: usize,
    p: usize,
    k: usize,
    values: Vec<f64>,
}

impl VertexParameter {
    pub fn new(node: usize, p: usize, k: usize, values: Vec<f64>) -> Result<Self> {
        if node >= p {
            return Err(shape(format!("node {node} out of range for p={p}")));
        }
        if values.len() != vertex_dim(p, k) {
            return Err(shape(format!(
                "vertex parameter needs {} entries, got {}",
                vertex_dim(p, k),
                values.len()
            )));
        }
        Ok(Self { node, p, k, values })
    }

    pub fn zeros(node: usize, p: usize, k: usize) -> Self {
        Self { node, p, k, values: vec![0.0; vertex_dim(p, k)] }
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn node_block(&self) -> &[f64] {
        &self.values[..self.k]
    }

    /// Offset of the block for neighbour `j`.
    pub fn edge_offset(&self, j: usize) -> usize {
        debug_assert!(j != self.node && j < self.p);
        let slot = if j < self.node { j } else { j - 1 };
        self.k + slot * self.k * self.k
    }

    /// Block for neighbour `j`, rows indexing this node's basis.
    pub fn edge_block(&self, j: usize) -> &[f64] {
        let o = self.edge_offset(j);
        &self.values[o..o + self.k * self.k]
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, features: &[f64]) -> f64 {
        self.values.iter().zip(features).map(|(a, b)| a * b).sum()
    }
}

/// A pairwise MRF with its parameter bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    space: FeatureSpace,
    node_params: Vec<Vec<f64>>,
    edges: BTreeMap<(usize, usize), EdgeBlock>,
    theta_max: f64,
    theta_min: f64,
    d: usize,
}

impl ModelSpec {
    /// Validated model. `d` defaults to the maximum degree of the edge set.
    pub fn new(
        space: FeatureSpace,
        node_params: Vec<Vec<f64>>,
        edges: Vec<(usize, usize, EdgeBlock)>,
        theta_max: f64,
        theta_min: f64,
        d: Option<usize>,
    ) -> Result<Self> {
        let p = space.p();
        let k = space.k();
        if node_params.len() != p {
            return Err(shape(format!("{} node parameter vectors for p={p}", node_params.len())));
        }
        if !(theta_max > 0.0 && theta_min > 0.0 && theta_min <= theta_max) {
            return Err(config("need 0 < theta_min ≤ theta_max"));
        }
        let mut map = BTreeMap::new();
        for (i, j, block) in edges {
            if i >= j || j >= p {
                return Err(shape(format!("edge ({i}, {j}) must satisfy i < j < p")));
            }
            if block.k() != k {
                return Err(shape("edge block dimension differs from basis k"));
            }
            if map.insert((i, j), block).is_some() {
                return Err(config(format!("duplicate edge ({i}, {j})")));
            }
        }
        map.retain(|_, b: &mut EdgeBlock| !b.is_zero());
        let check = |v: f64| -> Result<()> {
            if !v.is_finite() || v.abs() > theta_max {
                return Err(config(format!("parameter {v} exceeds theta_max={theta_max}")));
            }
            if v != 0.0 && v.abs() < theta_min {
                return Err(config(format!("nonzero parameter {v} below theta_min={theta_min}")));
            }
            Ok(())
        };
        for np in &node_params {
            if np.len() != k {
                return Err(shape("node parameter length differs from basis k"));
            }
            np.iter().try_for_each(|&v| check(v))?;
        }
        for b in map.values() {
            b.values().iter().try_for_each(|&v| check(v))?;
        }
        let mut degree = vec![0usize; p];
        for &(i, j) in map.keys() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let max_deg = degree.iter().copied().max().unwrap_or(0);
        let d = d.unwrap_or(max_deg);
        if max_deg > d {
            return Err(config(format!("maximum degree {max_deg} exceeds d={d}")));
        }
        Ok(Self { space, node_params, edges: map, theta_max, theta_min, d })
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn basis(&self) -> &Basis {
        self.space.basis()
    }

    pub fn domain(&self) -> &Domain {
        self.space.domain()
    }

    pub fn p(&self) -> usize {
        self.space.p()
    }

    pub fn k(&self) -> usize {
        self.space.k()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn node_params(&self) -> &[Vec<f64>] {
        &self.node_params
    }

    /// Nonzero edge blocks keyed by `(i, j)` with `i < j`.
    pub fn edges(&self) -> &BTreeMap<(usize, usize), EdgeBlock> {
        &self.edges
    }

    /// `γ = θ_max(k + k²d)`.
    pub fn gamma(&self) -> f64 {
        let k = self.k() as f64;
        self.theta_max * (k + k * k * self.d as f64)
    }

    pub fn edge_set(&self) -> EdgeSet {
        EdgeSet::from_pairs(self.p(), self.edges.keys().copied())
            .expect("model edges are valid pairs")
    }

    /// Neighbours of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .keys()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// Block coupling `i` and `j` with rows indexing node `i`'s basis.
    pub fn oriented_block(&self, i: usize, j: usize) -> Option<EdgeBlock> {
        if i < j {
            self.edges.get(&(i, j)).cloned()
        } else {
            self.edges.get(&(j, i)).map(EdgeBlock::transpose)
        }
    }

    /// True parameter `ϑ*^(i)` in vertex layout.
    pub fn vertex_parameter(&self, i: usize) -> VertexParameter {
        let (p, k) = (self.p(), self.k());
        let mut v = VertexParameter::zeros(i, p, k);
        v.values_mut()[..k].copy_from_slice(&self.node_params[i]);
        for j in self.neighbors(i) {
            let o = v.edge_offset(j);
            let b = self.oriented_block(i, j).expect("neighbour has a block");
            v.values_mut()[o..o + k * k].copy_from_slice(b.values());
        }
        v
    }

    /// Concatenation of all node and edge parameters (node blocks, then every pair `i<j` in order).
    pub fn concatenated(&self) -> Vec<f64> {
        let (p, k) = (self.p(), self.k());
        let mut out: Vec<f64> = self.node_params.iter().flatten().copied().collect();
        for i in 0..p {
            for j in i + 1..p {
                match self.edges.get(&(i, j)) {
                    Some(b) => out.extend_from_slice(b.values()),
                    None => out.extend(core::iter::repeat_n(0.0, k * k)),
                }
            }
        }
        out
    }

    /// `Σ_i θ^(i)·φ(x_i) + Σ_{i<j} vec(Θ^(ij))·ψ(x_i, x_j)`.
    pub fn log_density_unnormalized(&self, x: &[f64]) -> Result<f64> {
        self.domain().check_point(x)?;
        Ok(self.energy_unchecked(x))
    }

    pub(crate) fn energy_unchecked(&self, x: &[f64]) -> f64 {
        let k = self.k();
        let mut phi = vec![0.0; self.p() * k];
        for (j, &xj) in x.iter().enumerate() {
            self.basis().eval_into(xj, &mut phi[j * k..(j + 1) * k]);
        }
        let mut e = 0.0;
        for (i, th) in self.node_params.iter().enumerate() {
            e += th.iter().zip(&phi[i * k..(i + 1) * k]).map(|(a, b)| a * b).sum::<f64>();
        }
        for (&(i, j), b) in &self.edges {
            for r in 0..k {
                for s in 0..k {
                    e += b.get(r, s) * phi[i * k + r] * phi[j * k + s];
                }
            }
        }
        e
    }

    /// Canonical parameter `λ*(x_{−i})` of the conditional law of `x_i`; `x[i]` is ignored.
    pub fn conditional_canonical(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        if i >= self.p() {
            return Err(shape(format!("node {i} out of range")));
        }
        if x.len() != self.p() {
            return Err(shape("point length differs from p"));
        }
        for (j, iv) in self.domain().intervals().iter().enumerate() {
            if j != i {
                iv.check(x[j])?;
            }
        }
        Ok(self.conditional_canonical_unchecked(i, x))
    }

    pub(crate) fn conditional_canonical_unchecked(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let k = self.k();
        let mut lam = self.node_params[i].clone();
        let mut fj = vec![0.0; k];
        for j in self.neighbors(i) {
            let b = self.oriented_block(i, j).expect("neighbour has a block");
            self.basis().eval_into(x[j], &mut fj);
            for r in 0..k {
                lam[r] += (0..k).map(|s| b.get(r, s) * fj[s]).sum::<f64>();
            }
        }
        lam
    }

    /// Conditional density of `x_i` at `xi` given the other coordinates of `x`.
    pub fn conditional_density(&self, i: usize, xi: f64, x: &[f64], quadrature_nodes: usize) -> Result<f64> {
        if quadrature_nodes < 64 {
            return Err(config("conditional density needs at least 64 quadrature nodes"));
        }
        let lam = self.conditional_canonical(i, x)?;
        let iv = self.domain().interval(i);
        iv.check(xi)?;
        let z = log_partition_1d(self.basis(), &lam, iv, quadrature_nodes);
        let mut f = vec![0.0; self.k()];
        self.basis().eval_into(xi, &mut f);
        let e: f64 = lam.iter().zip(&f).map(|(a, b)| a * b).sum();
        let v = exp(e - z);
        if !v.is_finite() {
            return Err(numeric("conditional density is not finite"));
        }
        Ok(v)
    }

    /// Bounds `(f_L, f_U)` on every node-conditional density.
    pub fn density_bounds(&self) -> (f64, f64) {
        let g = self.gamma() * self.space.varphi_max();
        (exp(-2.0 * g) / self.domain().b_u(), exp(2.0 * g) / self.domain().b_l())
    }
}

/// `ln ∫_iv exp(ρ·φ(u)) du` by composite quadrature.
pub fn log_partition_1d(basis: &Basis, rho: &[f64], iv: Interval, nodes: usize) -> f64 {
    let rule = Rule::composite(iv.l, iv.u, nodes);
    let mut f = vec![0.0; basis.k()];
    let energies: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| {
            basis.eval_into(x, &mut f);
            rho.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() + crate::math::ln(w)
        })
        .collect();
    crate::math::log_sum_exp(&energies)
}

/// Mean of `φ` under the density `∝ exp(ρ·φ)` on `iv`, by quadrature.
pub fn mean_statistics_1d(basis: &Basis, rho: &[f64], iv: Interval, nodes: usize) -> Vec<f64> {
    let (mean, _) = moments_1d(basis, rho, iv, nodes);
    mean
}

/// Mean and covariance (row-major `k × k`) of `φ` under `∝ exp(ρ·φ)` on `iv`.
pub fn moments_1d(basis: &Basis, rho: &[f64], iv: Interval, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let k = basis.k();
    let rule = Rule::composite(iv.l, iv.u, nodes);
    let mut f = vec![0.0; k];
    let mut pts = Vec::with_capacity(rule.len() * k);
    let mut logw = Vec::with_capacity(rule.len());
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        basis.eval_into(x, &mut f);
        pts.extend_from_slice(&f);
        logw.push(rho.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() + crate::math::ln(w));
    }
    let lz = crate::math::log_sum_exp(&logw);
    let mut mean = vec![0.0; k];
    let mut second = vec![0.0; k * k];
    for (q, lw) in logw.iter().enumerate() {
        let w = exp(lw - lz);
        let fq = &pts[q * k..(q + 1) * k];
        for r in 0..k {
            mean[r] += w * fq[r];
            for s in 0..k {
                second[r * k + s] += w * fq[r] * fq[s];
            }
        }
    }
    for r in 0..k {
        for s in 0..k {
            second[r * k + s] -= mean[r] * mean[s];
        }
    }
    (mean, second)
}
