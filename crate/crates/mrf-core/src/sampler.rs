//! Single-site Gibbs sampling with Metropolized random-walk site kernels, and
//! exact inverse-CDF sampling in one dimension.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config, shape, Result};
use crate::math::exp;
use crate::model::{Basis, Interval, ModelSpec};
use crate::mrw::Mrw1d;

/// Grid size of the tabulated CDF in [`exact_sample_1d`].
pub const CDF_GRID: usize = 8192;

/// Observations stored row-major, `n × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * p {
            return Err(shape(format!("{} values for a {n}×{p} sample matrix", values.len())));
        }
        Ok(Self { n, p, values })
    }

    /// Matrix from rows of equal length.
    pub fn from_rows(p: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * p);
        for r in rows {
            if r.len() != p {
                return Err(shape("ragged sample rows"));
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), p, values)
    }

    pub fn empty(p: usize) -> Self {
        Self { n: 0, p, values: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.p..(t + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p.max(1)).take(self.n)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// First `n` rows.
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.n);
        Self { n, p: self.p, values: self.values[..n * self.p].to_vec() }
    }

    /// Rows in the given order.
    pub fn select_rows(&self, order: &[usize]) -> Self {
        let mut values = Vec::with_capacity(order.len() * self.p);
        for &t in order {
            values.extend_from_slice(self.row(t));
        }
        Self { n: order.len(), p: self.p, values }
    }
}

/// Gibbs schedule and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub inner_mrw_steps: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { burn_in: 1000, thin: 10, inner_mrw_steps: 5, seed: 0 }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 || self.inner_mrw_steps == 0 {
            return Err(config("thin and inner_mrw_steps must be at least 1"));
        }
        Ok(())
    }
}

/// Random stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One MRW step for site `i` of `model` at state `current`; returns the new `x_i`.
pub fn mrw_site_step<R: Rng + ?Sized>(model: &ModelSpec, i: usize, current: &[f64], rng: &mut R) -> Result<f64> {
    model.domain().check_point(current)?;
    if i >= model.p() {
        return Err(shape(format!("node {i} out of range")));
    }
    let lam = model.conditional_canonical_unchecked(i, current);
    let mut kernel = Mrw1d::new(model.basis(), &lam, model.domain().interval(i));
    let e = kernel.energy(current[i]);
    Ok(kernel.step(current[i], e, rng).0)
}

/// Gibbs output with per-site acceptance rates.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsRun {
    pub samples: SampleMatrix,
    pub acceptance: Vec<f64>,
}

/// `n` samples after `burn_in` sweeps, retaining one state every `thin` sweeps.
pub fn gibbs_sample(model: &ModelSpec, n: usize, cfg: &SamplerConfig) -> Result<SampleMatrix> {
    Ok(gibbs_sample_with_stats(model, n, cfg)?.samples)
}

/// As [`gibbs_sample`], also reporting acceptance rates.
pub fn gibbs_sample_with_stats(model: &ModelSpec, n: usize, cfg: &SamplerConfig) -> Result<GibbsRun> {
    cfg.validate()?;
    let (p, k) = (model.p(), model.k());
    if n == 0 {
        return Ok(GibbsRun { samples: SampleMatrix::empty(p), acceptance: vec![0.0; p] });
    }
    let basis = *model.basis();
    let sites: Vec<(Interval, Vec<f64>, Vec<(usize, Vec<f64>)>)> = (0..p)
        .map(|i| {
            let nb = model
                .neighbors(i)
                .into_iter()
                .map(|j| (j, model.oriented_block(i, j).expect("neighbour").values().to_vec()))
                .collect();
            (model.domain().interval(i), model.node_params()[i].clone(), nb)
        })
        .collect();
    let mut rngs: Vec<ChaCha8Rng> = (0..p).map(|i| stream_rng(cfg.seed, i as u64 + 1)).collect();
    let mut x: Vec<f64> = sites.iter().map(|s| s.0.midpoint()).collect();
    let mut phi = vec![0.0; p * k];
    for i in 0..p {
        basis.eval_into(x[i], &mut phi[i * k..(i + 1) * k]);
    }
    let mut lam = vec![0.0; k];
    let mut fz = vec![0.0; k];
    let mut accepted = vec![0u64; p];
    let mut proposed = vec![0u64; p];
    let mut sweep = |x: &mut [f64], phi: &mut [f64], accepted: &mut [u64], proposed: &mut [u64]| {
        for (i, (iv, theta, nb)) in sites.iter().enumerate() {
            lam.copy_from_slice(theta);
            for (j, block) in nb {
                let fj = &phi[j * k..(j + 1) * k];
                for r in 0..k {
                    lam[r] += block[r * k..(r + 1) * k].iter().zip(fj).map(|(a, b)| a * b).sum::<f64>();
                }
            }
            let fi = &phi[i * k..(i + 1) * k];
            let mut e = lam.iter().zip(fi).map(|(a, b)| a * b).sum::<f64>();
            let mut xi = x[i];
            let rng = &mut rngs[i];
            let mut moved = false;
            for _ in 0..cfg.inner_mrw_steps {
                let z = iv.l + iv.len() * rng.random::<f64>();
                let u = rng.random::<f64>();
                basis.eval_into(z, &mut fz);
                let ez: f64 = lam.iter().zip(&fz).map(|(a, b)| a * b).sum();
                if ez >= e || u < exp(ez - e) {
                    xi = z;
                    e = ez;
                    moved = true;
                    accepted[i] += 1;
                    phi[i * k..(i + 1) * k].copy_from_slice(&fz);
                }
            }
            proposed[i] += cfg.inner_mrw_steps as u64;
            if moved {
                x[i] = xi;
            }
        }
    };
    for _ in 0..cfg.burn_in {
        sweep(&mut x, &mut phi, &mut accepted, &mut proposed);
    }
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        for _ in 0..cfg.thin {
            sweep(&mut x, &mut phi, &mut accepted, &mut proposed);
        }
        values.extend_from_slice(&x);
    }
    let acceptance = accepted.iter().zip(&proposed).map(|(&a, &t)| a as f64 / t as f64).collect();
    Ok(GibbsRun { samples: SampleMatrix::new(n, p, values)?, acceptance })
}

/// `n` draws from `∝ exp(ρ·φ(x))` on `iv` by inverting a tabulated CDF.
pub fn exact_sample_1d<R: Rng + ?Sized>(basis: &Basis, rho: &[f64], iv: Interval, n: usize, rng: &mut R) -> Vec<f64> {
    let (grid, cdf) = tabulate_cdf(basis, rho, iv);
    (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * cdf[cdf.len() - 1];
            let q = cdf.partition_point(|&c| c <= u).clamp(1, cdf.len() - 1);
            let (c0, c1) = (cdf[q - 1], cdf[q]);
            let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
            (grid[q - 1] + frac * (grid[q] - grid[q - 1])).clamp(iv.l, iv.u)
        })
        .collect()
}

/// Grid and unnormalised cumulative trapezoid integral of `exp(ρ·φ)` on `iv`.
pub fn tabulate_cdf(basis: &Basis, rho: &[f64], iv: Interval) -> (Vec<f64>, Vec<f64>) {
    let m = CDF_GRID;
    let h = iv.len() / (m - 1) as f64;
    let mut phi = vec![0.0; basis.k()];
    let grid: Vec<f64> = (0..m).map(|q| if q + 1 == m { iv.u } else { iv.l + q as f64 * h }).collect();
    let energy: Vec<f64> = grid
        .iter()
        .map(|&x| {
            basis.eval_into(x, &mut phi);
            rho.iter().zip(&phi).map(|(a, b)| a * b).sum()
        })
        .collect();
    let top = energy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dens: Vec<f64> = energy.iter().map(|e| exp(e - top)).collect();
    let mut cdf = vec![0.0; m];
    for q in 1..m {
        cdf[q] = cdf[q - 1] + 0.5 * (dens[q] + dens[q - 1]) * (grid[q] - grid[q - 1]);
    }
    (grid, cdf)
}
