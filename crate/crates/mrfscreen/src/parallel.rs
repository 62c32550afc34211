//! Rayon versions of the per-node and per-replication loops. Each task draws from its own
//! seeded stream, so results are bitwise identical to the sequential library calls.

use anyhow::Result;
use mrf_core::diagnostics::{covariance_bundle, estimation_error, replication_seed, summarize_normality, NormalityReport, StudyConfig, DEFAULT_TENSOR_NODES};
use mrf_core::node_recovery::{recover_node, NodeRecoveryConfig};
use mrf_core::{entropic_descent, EdgeSet, FeatureSpace, GriseConfig, GriseSolution, ModelSpec, SampleMatrix};
use rayon::prelude::*;

use crate::UsageError;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MRFSCREEN_THREADS";

/// Worker count from `MRFSCREEN_THREADS`, or `None` for the rayon default.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(UsageError(format!("{THREADS_ENV} must be a positive integer, got {v:?}")).into()),
        },
    }
}

/// Pool honouring `MRFSCREEN_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// One GRISE solve per node, in node order.
pub fn fit_all_nodes(space: &FeatureSpace, samples: &SampleMatrix, cfg: &GriseConfig) -> Result<Vec<GriseSolution>> {
    Ok((0..space.p()).into_par_iter().map(|i| entropic_descent(space, samples, i, cfg)).collect::<mrf_core::Result<_>>()?)
}

/// Node parameters of every node, in node order.
pub fn full_node_pipeline(
    space: &FeatureSpace,
    samples: &SampleMatrix,
    solutions: &[GriseSolution],
    edges: &EdgeSet,
    cfg: &NodeRecoveryConfig,
) -> Result<Vec<Vec<f64>>> {
    anyhow::ensure!(solutions.len() == space.p() && edges.p() == space.p(), "one GRISE solution per node required");
    Ok(solutions
        .par_iter()
        .enumerate()
        .map(|(i, s)| Ok(recover_node(space, samples, s, &edges.neighbors(i), cfg)?.theta))
        .collect::<mrf_core::Result<_>>()?)
}

/// `ϑ̂ − ϑ*` for each seed.
pub fn estimation_errors(model: &ModelSpec, n: usize, seeds: &[u64], cfg: &StudyConfig) -> Result<Vec<Vec<f64>>> {
    Ok(seeds.par_iter().map(|&s| estimation_error(model, n, s, cfg)).collect::<mrf_core::Result<_>>()?)
}

/// Parallel normality study with the same replication seeds as the sequential one.
pub fn normality_study(model: &ModelSpec, n: usize, replications: usize, seed: u64, cfg: &StudyConfig) -> Result<NormalityReport> {
    anyhow::ensure!(model.p() == 2, "normality study needs p = 2");
    let seeds: Vec<u64> = (0..replications).map(|r| replication_seed(seed, r)).collect();
    let scale = (n as f64).sqrt();
    let errors: Vec<Vec<f64>> =
        estimation_errors(model, n, &seeds, cfg)?.into_iter().map(|e| e.into_iter().map(|v| scale * v).collect()).collect();
    let bundle = covariance_bundle(model, cfg.node, DEFAULT_TENSOR_NODES)?;
    Ok(summarize_normality(&errors, bundle.sandwich.as_deref()))
}
