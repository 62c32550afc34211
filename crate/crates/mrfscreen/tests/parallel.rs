mod common;

use common::*;
use mrf_core::diagnostics::{normality_study, StudyConfig};
use mrf_core::node_recovery::full_node_pipeline;
use mrf_core::structure::recover_edges;
use mrf_core::{fit_all_nodes, gibbs_sample, GriseConfig, SamplerConfig};
use mrfscreen::parallel;

#[test]
fn parallel_fits_match_sequential_bitwise() {
    let m = chain(5, 0.4, &[0.3, -0.3, 0.0], 0.5, 0.2);
    let h = hyper_for(&m.model, 10.0);
    let space = h.space().unwrap();
    let s = gibbs_sample(&m.model, 3000, &SamplerConfig { seed: 1, ..Default::default() }).unwrap();
    let g = h.grise_config(5).unwrap();
    let seq = fit_all_nodes(&space, &s, &g).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let par = pool.install(|| parallel::fit_all_nodes(&space, &s, &g)).unwrap();
    assert_eq!(seq, par);
    let edges = recover_edges(&seq, 0.2).unwrap().edges;
    let cfg = h.node_config(&space, 2, true).unwrap();
    let a = full_node_pipeline(&space, &s, &seq, &edges, &cfg).unwrap();
    let b = pool.install(|| parallel::full_node_pipeline(&space, &s, &seq, &edges, &cfg)).unwrap();
    assert_eq!(a.len(), 5);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[0].to_bits(), y[0].to_bits());
    }
}

#[test]
fn parallel_normality_study_matches_sequential() {
    let m = two_node();
    let mut grise = GriseConfig::new(1e-6, 3.0, 500);
    grise.eta0 = Some(1.0);
    let cfg = StudyConfig { node: 0, sampler: SamplerConfig::default(), grise };
    let seq = normality_study(&m.model, 200, 6, 9, &cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let par = pool.install(|| parallel::normality_study(&m.model, 200, 6, 9, &cfg)).unwrap();
    assert_eq!(seq.covariance.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), par.covariance.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    assert_eq!(seq.mean, par.mean);
}
