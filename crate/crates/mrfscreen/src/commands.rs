//! Subcommand implementations, independent of argument parsing.

use std::time::Instant;

use anyhow::{ensure, Context, Result};
use mrf_core::diagnostics::{
    complexity_constants, covariance_bundle, kappa_closed_form, population_giso_and_gradient, replication_seed, CovarianceBundle,
    KappaExample, ModelSummary, SampleComplexityConstants, DEFAULT_TENSOR_NODES,
};
use mrf_core::node_recovery::{default_rho_max, estimate_q_s};
use mrf_core::sampler::{gibbs_sample_with_stats, GibbsRun};
use mrf_core::structure::recover_edges;
use mrf_core::{EdgeBlock, ModelSpec, SamplerConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::HyperParams;
use crate::io::{BasisDto, CurveRow, DomainDto, NamedModel, NamedSamples};
use crate::metrics::{edge_params, evaluate, Metrics};
use crate::parallel;
use crate::report::{NodeTelemetry, RunReport, Timings, SCHEMA_VERSION};
use crate::UsageError;

/// Draws `n` Gibbs samples from `model`.
pub fn gen(model: &ModelSpec, n: usize, cfg: &SamplerConfig) -> Result<GibbsRun> {
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(gibbs_sample_with_stats(model, n, cfg)?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitOptions {
    pub seed: u64,
    pub edges_only: bool,
    pub quadrature_backward_map: bool,
}

/// GRISE on every node, thresholding, then node recovery unless `edges_only`.
pub fn fit(data: &NamedSamples, hyper: &HyperParams, opts: &FitOptions, samples_ref: &str) -> Result<RunReport> {
    let start = Instant::now();
    let space = hyper.space().map_err(|e| UsageError(format!("{e:#}")))?;
    let p = space.p();
    ensure!(data.samples.p() == p, UsageError(format!("samples have {} columns, config domain has {p}", data.samples.p())));
    ensure!(data.samples.n() > 0, "no samples to fit");
    for row in data.samples.rows() {
        space.domain().check_point(row).context("sample outside the configured domain")?;
    }
    let grise_cfg = hyper.grise_config(p)?;
    let node_cfg = if opts.edges_only { None } else { Some(hyper.node_config(&space, opts.seed, opts.quadrature_backward_map)?) };
    let pool = parallel::thread_pool()?;
    pool.install(|| {
        let t0 = Instant::now();
        let solutions = parallel::fit_all_nodes(&space, &data.samples, &grise_cfg)?;
        let grise_seconds = t0.elapsed().as_secs_f64();
        let rec = recover_edges(&solutions, hyper.theta_min)?;
        let t1 = Instant::now();
        let node_params = match &node_cfg {
            Some(cfg) => Some(parallel::full_node_pipeline(&space, &data.samples, &solutions, &rec.edges, cfg)?),
            None => None,
        };
        let node_recovery_seconds = t1.elapsed().as_secs_f64();
        let blocks = edge_params(&solutions, &rec.edges);
        let diagnostics = plug_in_diagnostics(&space, hyper, &blocks, node_params.as_deref());
        let report = RunReport {
            schema_version: SCHEMA_VERSION.into(),
            samples_ref: samples_ref.into(),
            n: data.samples.n(),
            p,
            names: data.names.clone(),
            basis: hyper.basis,
            domain: hyper.domain.clone(),
            seed: opts.seed,
            theta_min: hyper.theta_min,
            theta_max: hyper.theta_max,
            grise: solutions.iter().enumerate().map(|(i, s)| NodeTelemetry::of(i, s)).collect(),
            edges: rec.edges.iter().map(|(i, j)| [i, j]).collect(),
            disagreements: rec.disagreements,
            edge_params: blocks,
            node_params,
            diagnostics,
            timings: Timings { grise_seconds, node_recovery_seconds, total_seconds: start.elapsed().as_secs_f64() },
        };
        report.validate()?;
        Ok(report)
    })
}

/// Plug-in sandwich and Fisher matrices at the fitted model when `p ≤ 3`.
fn plug_in_diagnostics(
    space: &mrf_core::FeatureSpace,
    hyper: &HyperParams,
    blocks: &[crate::io::EdgeDto],
    node_params: Option<&[Vec<f64>]>,
) -> Option<serde_json::Value> {
    let np = node_params?;
    if space.p() > mrf_core::diagnostics::MAX_TENSOR_P {
        return None;
    }
    let edges = blocks.iter().map(|e| Ok((e.i, e.j, EdgeBlock::from_rows(&e.block)?))).collect::<mrf_core::Result<Vec<_>>>().ok()?;
    let clipped: Vec<Vec<f64>> = np
        .iter()
        .map(|v| v.iter().map(|&x| if x.abs() < hyper.theta_min { 0.0 } else { x.clamp(-hyper.theta_max, hyper.theta_max) }).collect())
        .collect();
    let model = ModelSpec::new(space.clone(), clipped, edges, hyper.theta_max, hyper.theta_min, Some(hyper.degree(space.p()))).ok()?;
    let nodes: Vec<serde_json::Value> = (0..space.p())
        .filter_map(|i| {
            let b = covariance_bundle(&model, i, 32).ok()?;
            Some(serde_json::json!({ "node": i, "sandwich": b.sandwich, "fisher_inverse": b.fisher_inverse }))
        })
        .collect();
    Some(serde_json::json!({ "plug_in": nodes }))
}

/// Compares a report with the true model; variable names, basis and domain must agree.
pub fn eval(report: &RunReport, truth: &NamedModel) -> Result<Metrics> {
    let m = &truth.model;
    ensure!(report.p == m.p(), "report has p = {}, truth has p = {}", report.p, m.p());
    ensure!(report.names == truth.names, "variable names differ: report {:?}, truth {:?}", report.names, truth.names);
    ensure!(report.basis == BasisDto::of(m.space().basis().family()), "basis differs between report and truth");
    ensure!(report.domain == DomainDto::of(m.domain()), "domain differs between report and truth");
    evaluate(m, &report.edge_set()?, &report.edge_params, report.node_params.as_deref())
}

/// Experiment curve: `trials` independent gen→fit→eval runs for each `n`.
pub fn curve(truth: &NamedModel, hyper: &HyperParams, n_list: &[usize], trials: usize, opts: &FitOptions) -> Result<Vec<CurveRow>> {
    ensure!(!n_list.is_empty() && n_list.windows(2).all(|w| w[0] < w[1]), UsageError("n list must be strictly ascending".into()));
    ensure!(n_list[0] > 0, UsageError("sample sizes must be positive".into()));
    let jobs: Vec<(usize, usize)> = n_list.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    let pool = parallel::thread_pool()?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(n, trial)| {
                let start = Instant::now();
                let seed = replication_seed(opts.seed ^ (n as u64).rotate_left(32), trial);
                let samples = gen(&truth.model, n, &hyper.sampler.config(seed))?.samples;
                let data = NamedSamples { names: truth.names.clone(), samples };
                let report = fit(&data, hyper, &FitOptions { seed, ..*opts }, "")?;
                let metrics = eval(&report, truth)?;
                Ok(CurveRow { n, trial, exact_recovery: metrics.exact_recovery, linf_error: metrics.linf_error, seconds: start.elapsed().as_secs_f64() })
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnoseOptions {
    pub node: usize,
    pub quadrature_nodes: usize,
    pub kappa_example: Option<KappaExample>,
    pub alpha: f64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self { node: 0, quadrature_nodes: DEFAULT_TENSOR_NODES, kappa_example: None, alpha: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub alpha: f64,
    pub gamma: f64,
    pub varphi_max: f64,
    pub kappa: f64,
    /// Grid estimate of the smallest single-variable Fisher eigenvalue.
    pub q_s_estimate: f64,
    pub c1: f64,
    pub ln_c2: f64,
    pub c3: f64,
}

impl ComplexityReport {
    fn of(c: &SampleComplexityConstants) -> Self {
        Self { alpha: c.alpha, gamma: c.gamma, varphi_max: c.varphi_max, kappa: c.kappa, q_s_estimate: c.q_s, c1: c.c1, ln_c2: c.ln_c2, c3: c.c3 }
    }
}

/// Population quantities of one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub node: usize,
    pub dim: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub b_condition: f64,
    pub sandwich: Option<Vec<f64>>,
    pub fisher: Vec<f64>,
    pub fisher_inverse: Option<Vec<f64>>,
    /// Population GISO at the true vertex parameter.
    pub giso_at_truth: f64,
    /// `‖∇‖_∞` of the population GISO at the true vertex parameter.
    pub stationarity_residual: f64,
    pub kappa: Option<f64>,
    pub complexity: Option<ComplexityReport>,
}

/// Covariance bundle, stationarity residual and, given an example family, `κ` and the constants.
pub fn diagnose(model: &ModelSpec, opts: &DiagnoseOptions) -> Result<Diagnosis> {
    ensure!(opts.node < model.p(), UsageError(format!("node {} out of range for p = {}", opts.node, model.p())));
    let CovarianceBundle { dim, a, b, sandwich, fisher, fisher_inverse, b_condition } = covariance_bundle(model, opts.node, opts.quadrature_nodes)?;
    let truth = model.vertex_parameter(opts.node);
    let (giso_at_truth, grad) = population_giso_and_gradient(model, opts.node, truth.values(), opts.quadrature_nodes)?;
    let stationarity_residual = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let (kappa, complexity) = match opts.kappa_example {
        Some(ex) => {
            let kappa = kappa_closed_form(ex, model.domain().radius(), model.d().max(1), model.theta_max())?;
            let rho_max = default_rho_max(model.k(), model.d().max(1), model.theta_max(), model.space().phi_max());
            let q_s = estimate_q_s(model.basis(), model.domain().interval(opts.node), rho_max);
            let c = complexity_constants(&ModelSummary::of(model, kappa, q_s), opts.alpha).map_err(|e| UsageError(e.to_string()))?;
            (Some(kappa), Some(ComplexityReport::of(&c)))
        }
        None => (None, None),
    };
    Ok(Diagnosis { node: opts.node, dim, a, b, b_condition, sandwich, fisher, fisher_inverse, giso_at_truth, stationarity_residual, kappa, complexity })
}

/// Diagonal of a row-major square matrix.
pub fn diagonal(m: &[f64], dim: usize) -> Vec<f64> {
    (0..dim).map(|q| m[q * dim + q]).collect()
}
