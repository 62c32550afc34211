//! Fixtures shared by the CLI integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mrf_core::{BasisFamily, BasisKind, Domain, EdgeBlock, FeatureSpace, ModelSpec};
use mrfscreen::config::HyperParams;
use mrfscreen::io::{default_names, BasisDto, DomainDto, NamedModel};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mrfscreen"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn mrfscreen")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn linear_space(p: usize) -> FeatureSpace {
    FeatureSpace::new(BasisFamily::new(BasisKind::Polynomial, 1).unwrap(), Domain::symmetric(p, 1.0).unwrap()).unwrap()
}

/// Two linear variables on `[−1, 1]` coupled by a unit interaction and no node terms.
pub fn two_node() -> NamedModel {
    let m = ModelSpec::new(linear_space(2), vec![vec![0.0]; 2], vec![(0, 1, EdgeBlock::new(1, vec![1.0]).unwrap())], 1.5, 0.5, None).unwrap();
    NamedModel { model: m, names: default_names(2) }
}

/// Linear chain with alternating edge signs and the given node parameters.
pub fn chain(p: usize, weight: f64, node: &[f64], theta_max: f64, theta_min: f64) -> NamedModel {
    let edges = (0..p - 1).map(|i| (i, i + 1, EdgeBlock::new(1, vec![if i % 2 == 0 { weight } else { -weight }]).unwrap())).collect();
    let nodes = (0..p).map(|i| vec![node[i % node.len()]]).collect();
    let m = ModelSpec::new(linear_space(p), nodes, edges, theta_max, theta_min, Some(2)).unwrap();
    NamedModel { model: m, names: default_names(p) }
}

/// Hyperparameters matching `m`, with a step size suited to small problems.
pub fn hyper_for(m: &ModelSpec, eta0: f64) -> HyperParams {
    let mut h: HyperParams = serde_json::from_value(serde_json::json!({
        "basis": BasisDto::of(m.space().basis().family()),
        "domain": DomainDto::of(m.domain()),
        "theta_max": m.theta_max(),
        "theta_min": m.theta_min(),
        "d": m.d().max(1),
    }))
    .unwrap();
    h.grise.eta0 = Some(eta0);
    h
}

pub fn write_hyper(dir: &Path, h: &HyperParams) -> PathBuf {
    let path = dir.join("hyper.json");
    std::fs::write(&path, serde_json::to_string_pretty(h).unwrap()).unwrap();
    path
}
