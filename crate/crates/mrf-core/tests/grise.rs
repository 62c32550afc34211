mod common;

use common::*;
use mrf_core::grise::{
    default_eta0, entropic_descent_on, giso_gradient, giso_value, simplex_size, sufficient_iterations, NodeFeatures,
};
use mrf_core::{
    entropic_descent, fit_all_nodes, gibbs_sample, project_to_feasible, GriseConfig, Projection, SampleMatrix,
    SamplerConfig, VertexParameter,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform_samples(n: usize, p: usize, seed: u64) -> SampleMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
    SampleMatrix::from_rows(p, &rows).unwrap()
}

fn random_vertex(node: usize, p: usize, k: usize, radius: f64, rng: &mut ChaCha8Rng) -> VertexParameter {
    let dim = mrf_core::model::vertex_dim(p, k);
    let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let l1: f64 = raw.iter().map(|v| v.abs()).sum();
    let scale = rng.random_range(0.0..radius) / l1;
    VertexParameter::new(node, p, k, raw.iter().map(|v| v * scale).collect()).unwrap()
}

#[test]
fn giso_value_examples() {
    let space = polynomial_space(3, 2, 1.0);
    let s = uniform_samples(40, 3, 1);
    assert_eq!(giso_value(&space, &s, 1, &VertexParameter::zeros(1, 3, 2)).unwrap(), 1.0);
    let one = s.head(1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = random_vertex(1, 3, 2, 1.0, &mut rng);
    let f = space.feature_vector(1, one.row(0)).unwrap();
    let direct = (-v.values().iter().zip(&f).map(|(a, b)| a * b).sum::<f64>()).exp();
    assert!((giso_value(&space, &one, 1, &v).unwrap() - direct).abs() < 1e-15);
    assert!(giso_value(&space, &SampleMatrix::empty(3), 1, &v).is_err());
}

#[test]
fn giso_value_bounds() {
    let space = polynomial_space(4, 2, 1.0);
    let s = uniform_samples(200, 4, 3);
    let gamma = 1.5;
    let phi = space.varphi_max();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let v = random_vertex(2, 4, 2, gamma, &mut rng);
        let g = giso_value(&space, &s, 2, &v).unwrap();
        assert!((-gamma * phi).exp() <= g && g <= (gamma * phi).exp());
    }
}

#[test]
fn gradient_at_zero_is_negative_feature_mean() {
    let space = polynomial_space(3, 2, 1.0);
    let s = uniform_samples(100, 3, 5);
    let g = giso_gradient(&space, &s, 0, &VertexParameter::zeros(0, 3, 2)).unwrap();
    let mut mean = vec![0.0; space.dim()];
    for r in s.rows() {
        for (m, f) in mean.iter_mut().zip(space.feature_vector(0, r).unwrap()) {
            *m += f / 100.0;
        }
    }
    for (a, b) in g.iter().zip(&mean) {
        assert!((a + b).abs() < 1e-14);
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for inst in 0..50 {
        let (p, k) = (2 + inst % 3, 1 + inst % 2);
        let space = if inst % 4 == 3 { harmonic_space(p, 2, 1.0) } else { polynomial_space(p, k, 1.0) };
        let k = space.k();
        let s = uniform_samples(30 + inst, p, 100 + inst as u64);
        let i = inst % p;
        let v = random_vertex(i, p, k, 1.0, &mut rng);
        let g = giso_gradient(&space, &s, i, &v).unwrap();
        let h = 1e-5;
        for l in 0..v.values().len() {
            let mut plus = v.clone();
            plus.values_mut()[l] += h;
            let mut minus = v.clone();
            minus.values_mut()[l] -= h;
            let fd = (giso_value(&space, &s, i, &plus).unwrap() - giso_value(&space, &s, i, &minus).unwrap()) / (2.0 * h);
            let rel = (fd - g[l]).abs() / g[l].abs().max(1e-3);
            assert!(rel < 1e-6, "instance {inst} coordinate {l}: {fd} vs {}", g[l]);
        }
    }
}

#[test]
fn gradient_vanishes_at_truth_for_model_samples() {
    let m = two_node_model(1.0);
    let n = 20_000;
    let s = gibbs_sample(&m, n, &SamplerConfig { seed: 7, ..Default::default() }).unwrap();
    for i in 0..2 {
        let truth = m.vertex_parameter(i);
        let g = giso_gradient(m.space(), &s, i, &truth).unwrap();
        let f = NodeFeatures::build(m.space(), &s, i).unwrap();
        for l in 0..g.len() {
            let terms: Vec<f64> = (0..n)
                .map(|t| {
                    let row = f.row(t);
                    -row[l] * (-truth.values().iter().zip(row).map(|(a, b)| a * b).sum::<f64>()).exp()
                })
                .collect();
            let mean = terms.iter().sum::<f64>() / n as f64;
            let sd = (terms.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt();
            assert!(g[l].abs() < 3.0 * sd / (n as f64).sqrt(), "node {i} coordinate {l}");
        }
    }
}

fn grid_minimum(f: &NodeFeatures, gamma: f64, step: f64) -> f64 {
    let m = (gamma / step).round() as i64;
    let mut best = f64::INFINITY;
    for a in -m..=m {
        let rest = m - a.abs();
        for b in -rest..=rest {
            best = best.min(f.value(&[a as f64 * step, b as f64 * step]));
        }
    }
    best
}

#[test]
fn entropic_descent_is_epsilon_optimal_against_grid_search() {
    let eps = 1e-3;
    for seed in 0..20u64 {
        let m = chain_model(2, 0.8, &[0.5, -0.5], 1.0, 0.2);
        let s = gibbs_sample(&m, 50, &SamplerConfig { seed, ..Default::default() }).unwrap();
        let f = NodeFeatures::build(m.space(), &s, 0).unwrap();
        let mut cfg = GriseConfig::new(eps, m.gamma(), 20_000);
        cfg.eta0 = Some(1.0);
        let sol = entropic_descent_on(&f, m.space().varphi_max(), &cfg, |_| {}).unwrap();
        let oracle = grid_minimum(&f, m.gamma(), 0.01);
        assert!(sol.objective <= oracle + eps, "seed {seed}: {} vs {oracle}", sol.objective);
        assert!(sol.vertex.l1_norm() <= m.gamma() + 1e-12);
    }
}

#[test]
fn zero_features_stay_at_unit_objective() {
    let space = polynomial_space(1, 1, 1.0);
    let s = SampleMatrix::from_rows(1, &vec![vec![0.0]; 10]).unwrap();
    let f = NodeFeatures::build(&space, &s, 0).unwrap();
    let mut objectives = Vec::new();
    let sol = entropic_descent_on(&f, 2.0, &GriseConfig::new(1e-3, 1.0, 50), |st| objectives.push(st.objective)).unwrap();
    assert!(objectives.iter().all(|&o| o == 1.0));
    assert_eq!(sol.vertex.values(), &[0.0]);
    assert_eq!(sol.objective, 1.0);
}

#[test]
fn simplex_initialisation_and_invariants() {
    let m = chain_model(3, 0.4, &[0.3], 0.5, 0.2);
    let s = gibbs_sample(&m, 300, &SamplerConfig { seed: 8, ..Default::default() }).unwrap();
    let f = NodeFeatures::build(m.space(), &s, 1).unwrap();
    let n_simplex = simplex_size(f.dim());
    assert_eq!(n_simplex, 2 * (1 + 2) + 1);
    let init = std::f64::consts::E / n_simplex as f64;
    let mut cfg = GriseConfig::new(1e-9, m.gamma(), 500);
    cfg.eta0 = Some(5.0);
    cfg.patience = usize::MAX;
    let mut best = f64::INFINITY;
    let mut visited = Vec::new();
    let sol = entropic_descent_on(&f, m.space().varphi_max(), &cfg, |st| {
        if st.iteration == 1 {
            assert!(st.w_plus.iter().chain(st.w_minus).all(|&w| (w - init).abs() < 1e-15));
            assert!((st.y - init).abs() < 1e-15);
        } else {
            let total: f64 = st.w_plus.iter().chain(st.w_minus).sum::<f64>() + st.y;
            assert!((total - 1.0).abs() < 1e-12);
        }
        assert!(st.w_plus.iter().chain(st.w_minus).all(|&w| w >= 0.0) && st.y >= 0.0);
        best = best.min(st.objective);
        visited.push(st.objective);
    })
    .unwrap();
    assert_eq!(sol.objective, best);
    assert_eq!(visited[sol.best_iterate_index - 1], best);
    assert!((sol.objective - f.value(sol.vertex.values())).abs() < 1e-12);
}

#[test]
fn projected_solution_reports_its_own_objective() {
    let m = chain_model(3, 0.4, &[0.3], 0.5, 0.2);
    let s = gibbs_sample(&m, 500, &SamplerConfig { seed: 9, ..Default::default() }).unwrap();
    let mut cfg = GriseConfig::new(1e-6, m.gamma(), 300);
    cfg.eta0 = Some(5.0);
    cfg.projection = Some(Projection { theta_min: 0.2, theta_max: 0.5 });
    let sol = entropic_descent(m.space(), &s, 1, &cfg).unwrap();
    let direct = giso_value(m.space(), &s, 1, &sol.vertex).unwrap();
    assert!((sol.objective - direct).abs() < 1e-12);
    assert_eq!(sol.vertex, project_to_feasible(&sol.unconstrained, 0.2, 0.5));
}

#[test]
fn projection_examples() {
    let v = VertexParameter::new(0, 2, 1, vec![0.3, -0.5]).unwrap();
    assert_eq!(project_to_feasible(&v, 0.2, 0.5), v);
    let over = VertexParameter::new(0, 2, 1, vec![0.6, -0.6]).unwrap();
    assert_eq!(project_to_feasible(&over, 0.2, 0.5).values(), &[0.5, -0.5]);
    let small = VertexParameter::new(0, 2, 1, vec![0.4 * 0.2, -0.8 * 0.2]).unwrap();
    assert_eq!(project_to_feasible(&small, 0.2, 0.5).values(), &[0.0, -0.2]);
    let tie = VertexParameter::new(0, 2, 1, vec![0.1, -0.1]).unwrap();
    assert_eq!(project_to_feasible(&tie, 0.2, 0.5).values(), &[0.2, -0.2]);
}

#[test]
fn step_and_iteration_formulas() {
    let n = simplex_size(2);
    assert!((default_eta0(2.0, 2.0, n) - (5f64.ln()).sqrt() / (8.0 * 4f64.exp())).abs() < 1e-15);
    let t = sufficient_iterations(2.0, 2.0, 0.1, n);
    assert!((t - 16.0 * 8f64.exp() * 5f64.ln() / 0.01).abs() < 1e-6 * t);
    assert!(GriseConfig::new(0.0, 1.0, 10).validate().is_err());
    assert!(GriseConfig { eta0: Some(-1.0), ..GriseConfig::new(0.1, 1.0, 10) }.validate().is_err());
}

#[test]
fn single_node_model_has_no_edge_blocks() {
    let space = polynomial_space(1, 2, 1.0);
    let s = uniform_samples(100, 1, 10);
    let sols = fit_all_nodes(&space, &s, &GriseConfig::new(1e-3, 1.0, 100)).unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0].vertex.values().len(), 2);
}

#[test]
fn row_order_does_not_change_solutions() {
    let m = chain_model(3, 0.4, &[0.3], 0.5, 0.2);
    let s = gibbs_sample(&m, 400, &SamplerConfig { seed: 11, ..Default::default() }).unwrap();
    let mut order: Vec<usize> = (0..400).collect();
    order.reverse();
    let mut cfg = GriseConfig::new(1e-6, m.gamma(), 200);
    cfg.eta0 = Some(5.0);
    let a = fit_all_nodes(m.space(), &s, &cfg).unwrap();
    let b = fit_all_nodes(m.space(), &s.select_rows(&order), &cfg).unwrap();
    for (x, y) in a.iter().zip(&b) {
        for (u, v) in x.vertex.values().iter().zip(y.vertex.values()) {
            assert!((u - v).abs() < 1e-9);
        }
    }
}

fn lemma5_gap(z: f64) -> f64 {
    (-z).exp() - 1.0 + z - z * z / (2.0 + z.abs())
}

#[test]
fn functional_inequality_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1_000_000 {
        let z: f64 = rng.random_range(-50.0..=50.0);
        assert!(lemma5_gap(z) >= -1e-12 * (1.0 + z.abs()), "z = {z}");
    }
    assert_eq!(lemma5_gap(0.0), 0.0);
}

#[test]
fn taylor_residual_lower_bound() {
    let m = chain_model(3, 0.4, &[0.3], 0.5, 0.2);
    let s = gibbs_sample(&m, 300, &SamplerConfig { seed: 13, ..Default::default() }).unwrap();
    let f = NodeFeatures::build(m.space(), &s, 1).unwrap();
    let h = f.correlation();
    let gamma = m.gamma();
    let phi = m.space().varphi_max();
    let d = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut grad = vec![0.0; d];
    for _ in 0..500 {
        let v = random_vertex(1, 3, 1, gamma, &mut rng);
        let delta: Vec<f64> = (0..d).map(|_| rng.random_range(-0.5..0.5)).collect();
        let moved: Vec<f64> = v.values().iter().zip(&delta).map(|(a, b)| a + b).collect();
        let s0 = f.value_and_gradient(v.values(), &mut grad);
        let residual = f.value(&moved) - s0 - grad.iter().zip(&delta).map(|(a, b)| a * b).sum::<f64>();
        let quad: f64 = (0..d).map(|a| (0..d).map(|b| delta[a] * h[a * d + b] * delta[b]).sum::<f64>()).sum();
        let l1: f64 = delta.iter().map(|x| x.abs()).sum();
        let bound = (-gamma * phi).exp() * quad / (2.0 + phi * l1);
        assert!(residual >= 0.0);
        assert!(residual >= bound * (1.0 - 1e-12));
    }
}

proptest! {
    #[test]
    fn projection_lands_in_feasible_set_and_is_idempotent(vals in prop::collection::vec(-2.0f64..2.0, 3), tmin in 0.05f64..0.5, extra in 0.0f64..1.0) {
        let tmax = tmin + extra;
        let v = VertexParameter::new(0, 2, 1, vec![vals[0], vals[1]]).unwrap();
        let pv = project_to_feasible(&v, tmin, tmax);
        for &x in pv.values() {
            prop_assert!(x == 0.0 || (tmin <= x.abs() && x.abs() <= tmax));
        }
        prop_assert_eq!(project_to_feasible(&pv, tmin, tmax), pv);
    }

    #[test]
    fn giso_is_convex_along_random_lines(seed in any::<u64>(), t in 0.0f64..1.0) {
        let space = polynomial_space(3, 1, 1.0);
        let s = uniform_samples(50, 3, seed);
        let f = NodeFeatures::build(&space, &s, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let a: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        prop_assert!(f.value(&mid) <= t * f.value(&a) + (1.0 - t) * f.value(&b) + 1e-12);
    }
}
