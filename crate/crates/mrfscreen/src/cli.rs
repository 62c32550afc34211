//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mrf_core::diagnostics::KappaExample;
use mrf_core::SamplerConfig;

use crate::commands::{self, DiagnoseOptions, FitOptions};
use crate::config::HyperParams;
use crate::io;
use crate::report::RunReport;
use crate::UsageError;

#[derive(Debug, Parser)]
#[command(name = "mrfscreen", version, about = "Learn sparse continuous pairwise Markov random fields")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Hyperparameter file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw Gibbs samples from a model file into a CSV.
    Gen {
        model: PathBuf,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long, default_value_t = SamplerConfig::default().burn_in)]
        burn_in: usize,
        #[arg(long, default_value_t = SamplerConfig::default().thin)]
        thin: usize,
        #[arg(long, default_value_t = SamplerConfig::default().inner_mrw_steps)]
        inner_mrw_steps: usize,
    },
    /// Fit structure and parameters to a sample CSV; writes a JSON report.
    Fit {
        samples: PathBuf,
        /// Skip node-parameter recovery.
        #[arg(long)]
        edges_only: bool,
        /// Use exact quadrature means in the backward map.
        #[arg(long)]
        quadrature_backward_map: bool,
    },
    /// Compare a report with the true model.
    Eval { report: PathBuf, truth: PathBuf },
    /// Recovery and error versus sample size.
    Curve {
        model: PathBuf,
        /// Comma-separated ascending sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        edges_only: bool,
        #[arg(long)]
        quadrature_backward_map: bool,
    },
    /// Population diagnostics of a model with at most three variables.
    Diagnose {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        node: usize,
        #[arg(long, default_value_t = mrf_core::diagnostics::DEFAULT_TENSOR_NODES)]
        quadrature_nodes: usize,
        /// Example family for the closed-form κ (S1, S2, S3, S4).
        #[arg(long)]
        kappa_example: Option<KappaExample>,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
    },
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| UsageError(format!("--{flag} is required")).into())
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

/// Runs a parsed command, writing human-readable output to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Gen { model, n, burn_in, thin, inner_mrw_steps } => {
            let out = need(&cli.out, "out")?;
            let m = io::read_model(model)?;
            let cfg = SamplerConfig { burn_in: *burn_in, thin: *thin, inner_mrw_steps: *inner_mrw_steps, seed: cli.seed };
            let run = commands::gen(&m.model, *n, &cfg)?;
            io::write_samples_file(out, &m.names, &run.samples)?;
            writeln!(stdout, "n = {}, p = {}", run.samples.n(), run.samples.p())?;
            writeln!(stdout, "acceptance = [{}]", fmt_vec(&run.acceptance))?;
        }
        Command::Fit { samples, edges_only, quadrature_backward_map } => {
            let out = need(&cli.out, "out")?;
            let hyper = HyperParams::read(need(&cli.config, "config")?)?;
            let data = io::read_samples_file(samples)?;
            let opts = FitOptions { seed: cli.seed, edges_only: *edges_only, quadrature_backward_map: *quadrature_backward_map };
            let report = commands::fit(&data, &hyper, &opts, &samples.display().to_string())?;
            io::write_json(out, &report)?;
            writeln!(stdout, "n = {}, p = {}, edges = {}, disagreements = {}", report.n, report.p, report.edges.len(), report.disagreements)?;
            for e in &report.edges {
                writeln!(stdout, "edge {} {}", e[0], e[1])?;
            }
        }
        Command::Eval { report, truth } => {
            let r = RunReport::read(report)?;
            let t = io::read_model(truth)?;
            let m = commands::eval(&r, &t)?;
            writeln!(stdout, "linf_error = {:.6}", m.linf_error)?;
            writeln!(stdout, "edge_linf_error = {:.6}", m.edge_linf_error)?;
            if let Some(e) = m.node_linf_error {
                writeln!(stdout, "node_linf_error = {e:.6}")?;
            }
            writeln!(stdout, "precision = {:.6}, recall = {:.6}, exact = {}", m.precision, m.recall, m.exact_recovery)?;
            if let Some(out) = &cli.out {
                io::write_json(out, &m)?;
            }
        }
        Command::Curve { model, n_list, trials, edges_only, quadrature_backward_map } => {
            let out = need(&cli.out, "out")?;
            let hyper = HyperParams::read(need(&cli.config, "config")?)?;
            let m = io::read_model(model)?;
            let opts = FitOptions { seed: cli.seed, edges_only: *edges_only, quadrature_backward_map: *quadrature_backward_map };
            let rows = commands::curve(&m, &hyper, n_list, *trials, &opts)?;
            let f = std::fs::File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
            io::write_curve(f, &rows)?;
            for &n in n_list {
                let sel: Vec<_> = rows.iter().filter(|r| r.n == n).collect();
                let exact = sel.iter().filter(|r| r.exact_recovery).count();
                writeln!(stdout, "n = {n}: exact recovery {exact}/{}", sel.len())?;
            }
        }
        Command::Diagnose { model, node, quadrature_nodes, kappa_example, alpha } => {
            let m = io::read_model(model)?;
            let opts = DiagnoseOptions { node: *node, quadrature_nodes: *quadrature_nodes, kappa_example: *kappa_example, alpha: *alpha };
            let d = commands::diagnose(&m.model, &opts)?;
            writeln!(stdout, "node = {}", d.node)?;
            writeln!(stdout, "A diagonal = [{}]", fmt_vec(&commands::diagonal(&d.a, d.dim)))?;
            writeln!(stdout, "B diagonal = [{}]", fmt_vec(&commands::diagonal(&d.b, d.dim)))?;
            match &d.sandwich {
                Some(s) => writeln!(stdout, "sandwich diagonal = [{}]", fmt_vec(&commands::diagonal(s, d.dim)))?,
                None => writeln!(stdout, "sandwich omitted: B condition number {:.3e}", d.b_condition)?,
            }
            if let Some(fi) = &d.fisher_inverse {
                writeln!(stdout, "fisher inverse diagonal = [{}]", fmt_vec(&commands::diagonal(fi, d.dim)))?;
            }
            writeln!(stdout, "stationarity residual = {:.3e}", d.stationarity_residual)?;
            if let Some(k) = d.kappa {
                writeln!(stdout, "kappa = {k:.6e}")?;
            }
            if let Some(c) = &d.complexity {
                writeln!(stdout, "c1 = {:.6e}, ln c2 = {:.6}, c3 = {:.6e}, q_s estimate = {:.6}", c.c1, c.ln_c2, c.c3, c.q_s_estimate)?;
            }
            if let Some(out) = &cli.out {
                io::write_json(out, &d)?;
            }
        }
    }
    Ok(())
}
