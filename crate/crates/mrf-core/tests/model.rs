mod common;

use common::*;
use mrf_core::model::{kron, log_partition_1d, moments_1d, vertex_dim};
use mrf_core::{Basis, BasisFamily, BasisKind, Domain, EdgeBlock, FeatureSpace, Interval, ModelSpec, VertexParameter};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn polynomial_basis_values() {
    let b = Basis::polynomial(2, 1.0).unwrap();
    assert_eq!(b.eval(0.5).unwrap(), vec![0.5, 0.25]);
    let b1 = Basis::polynomial(1, 1.0).unwrap();
    assert_eq!(b1.eval(-1.0).unwrap(), vec![-1.0]);
}

#[test]
fn harmonic_basis_at_origin() {
    let h = Basis::harmonic(2, 1.0).unwrap();
    assert_eq!(h.eval(0.0).unwrap(), vec![0.0, 1.0]);
}

#[test]
fn out_of_domain_is_rejected() {
    let b = Basis::polynomial(2, 1.0).unwrap();
    assert!(matches!(b.eval(1.5), Err(mrf_core::Error::Domain { .. })));
    let space = polynomial_space(2, 1, 1.0);
    assert!(space.centered_basis(0, -1.01).is_err());
    assert!(space.feature_vector(0, &[0.0, 2.0]).is_err());
}

#[test]
fn edge_basis_examples() {
    let b = Basis::polynomial(1, 1.0).unwrap();
    assert_eq!(b.eval_edge(0.5, -0.4).unwrap(), vec![0.5 * -0.4]);
    assert_eq!(b.eval_edge(0.0, 0.7).unwrap(), vec![0.0]);
    let b2 = Basis::polynomial(2, 2.0).unwrap();
    let (x, y) = (0.5_f64, 2.0_f64);
    let expected: Vec<f64> = [x, x * x].iter().flat_map(|a| [y, y * y].map(|c| a * c)).collect();
    assert_eq!(b2.eval_edge(x, y).unwrap(), expected);
    assert_eq!(expected, vec![1.0, 2.0, 0.5, 1.0]);
}

#[test]
fn centered_basis_examples() {
    let p1 = polynomial_space(1, 1, 1.0);
    assert_eq!(p1.centered_basis(0, 0.3).unwrap(), vec![0.3]);
    // Uniform average of y² over [−1, 1], checked against Simpson.
    let p2 = polynomial_space(1, 2, 1.0);
    let avg = simpson(|y| y * y, -1.0, 1.0, 200) / 2.0;
    let c = p2.centered_basis(0, 0.0).unwrap();
    assert!(close(c[0], 0.0, 1e-15));
    assert!(close(c[1], -avg, 1e-12));
    assert!(close(c[1], -1.0 / 3.0, 1e-15));
    let h = harmonic_space(1, 2, 1.0);
    let c = h.centered_basis(0, 0.0).unwrap();
    assert!(close(c[0], 0.0, 1e-15) && close(c[1], 1.0, 1e-15));
}

#[test]
fn centers_match_simpson_on_asymmetric_intervals() {
    let dom = Domain::new(vec![Interval::new(-0.5, 1.5).unwrap(), Interval::new(0.2, 1.0).unwrap()], 0.5, 2.0).unwrap();
    for kind in [BasisKind::Polynomial, BasisKind::Harmonic] {
        let space = FeatureSpace::new(BasisFamily::new(kind, 4).unwrap(), dom.clone()).unwrap();
        for (i, iv) in dom.intervals().iter().enumerate() {
            for r in 0..4 {
                let f = |y: f64| space.basis().eval(y).unwrap()[r];
                let avg = simpson(f, iv.l, iv.u, 1024) / iv.len();
                assert!(close(space.center(i)[r], avg, 1e-10), "{kind:?} node {i} r {r}");
            }
        }
    }
}

#[test]
fn centered_edge_examples() {
    let s1 = polynomial_space(2, 1, 1.0);
    assert!(close(s1.centered_edge_basis(0, 1, 0.3, 0.5).unwrap()[0], 0.15, 1e-15));
    let s2 = polynomial_space(2, 2, 1.0);
    let e = s2.centered_edge_basis(0, 1, 0.0, 1.0).unwrap();
    let avg = simpson(|u| u * u, -1.0, 1.0, 200) / 2.0;
    // Entry (r=2, s=1) in row-major order.
    assert!(close(e[2], -avg, 1e-12));
}

#[test]
fn feature_vector_examples() {
    let s = polynomial_space(2, 1, 1.0);
    let f = s.feature_vector(0, &[0.3, 0.5]).unwrap();
    assert!(close(f[0], 0.3, 1e-15) && close(f[1], 0.15, 1e-15));
    let s3 = polynomial_space(3, 2, 1.0);
    assert_eq!(s3.feature_vector(1, &[0.1, 0.2, 0.3]).unwrap().len(), 2 + 4 * 2);
    assert_eq!(vertex_dim(3, 2), 10);
}

#[test]
fn feature_bound_monte_carlo() {
    let s = polynomial_space(4, 1, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect();
        for i in 0..4 {
            let f = s.feature_vector(i, &x).unwrap();
            assert!(f.iter().all(|v| v.abs() <= 3.0));
            assert!(f.iter().all(|v| v.abs() <= s.varphi_max()));
        }
    }
}

#[test]
fn features_average_to_zero_over_own_variable() {
    for space in [polynomial_space(3, 3, 1.5), harmonic_space(3, 4, 1.0)] {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..3 {
            let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let iv = space.domain().interval(i);
            for l in 0..space.dim() {
                let avg = simpson(
                    |u| {
                        x[i] = u;
                        space.feature_vector(i, &x).unwrap()[l]
                    },
                    iv.l,
                    iv.u,
                    512,
                ) / iv.len();
                assert!(avg.abs() < 1e-8, "node {i} coordinate {l}: {avg}");
            }
        }
    }
}

#[test]
fn log_density_examples() {
    let zero = ModelSpec::new(polynomial_space(3, 2, 1.0), vec![vec![0.0; 2]; 3], vec![], 1.0, 0.1, None).unwrap();
    assert_eq!(zero.log_density_unnormalized(&[0.3, -0.2, 0.9]).unwrap(), 0.0);
    let m = two_node_model(1.0);
    assert!(close(m.log_density_unnormalized(&[0.5, 0.5]).unwrap(), 0.25, 1e-15));
}

fn random_model(seed: u64, p: usize, k: usize) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = polynomial_space(p, k, 1.0);
    let val = |rng: &mut ChaCha8Rng| {
        let v: f64 = rng.random_range(0.1..0.5);
        if rng.random::<bool>() { v } else { -v }
    };
    let nodes = (0..p).map(|_| (0..k).map(|_| val(&mut rng)).collect()).collect();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random::<f64>() < 0.5 {
                edges.push((i, j, EdgeBlock::new(k, (0..k * k).map(|_| val(&mut rng)).collect()).unwrap()));
            }
        }
    }
    ModelSpec::new(space, nodes, edges, 0.5, 0.1, None).unwrap()
}

#[test]
fn log_density_matches_naive_sum() {
    for seed in 0..20 {
        let m = random_model(seed, 4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let phi = |v: f64| [v, v * v];
        let mut naive = 0.0;
        for i in 0..4 {
            naive += m.node_params()[i][0] * phi(x[i])[0] + m.node_params()[i][1] * phi(x[i])[1];
        }
        for (&(i, j), b) in m.edges() {
            for r in 0..2 {
                for s in 0..2 {
                    naive += b.get(r, s) * phi(x[i])[r] * phi(x[j])[s];
                }
            }
        }
        assert!(close(m.log_density_unnormalized(&x).unwrap(), naive, 1e-13));
    }
}

#[test]
fn vertex_energy_reproduces_pairwise_energy() {
    // The edge part of ϑ^(i)·φ^(i) uses the centered first argument; with the
    // raw basis in place of the centered one it equals the pairwise energy.
    for seed in 0..10 {
        let m = random_model(seed, 4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 7);
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect();
        for i in 0..4 {
            let v = m.vertex_parameter(i);
            for j in (0..4).filter(|&j| j != i) {
                let blk = v.edge_block(j);
                let raw = kron(&m.basis().eval(x[i]).unwrap(), &m.basis().eval(x[j]).unwrap());
                let from_vertex: f64 = blk.iter().zip(&raw).map(|(a, b)| a * b).sum();
                let (a, b) = (i.min(j), i.max(j));
                let direct = m.edges().get(&(a, b)).map_or(0.0, |blk| {
                    let raw_ab = kron(&m.basis().eval(x[a]).unwrap(), &m.basis().eval(x[b]).unwrap());
                    blk.values().iter().zip(&raw_ab).map(|(p, q)| p * q).sum()
                });
                assert!(close(from_vertex, direct, 1e-14));
            }
        }
    }
}

#[test]
fn conditional_canonical_examples() {
    let alone = ModelSpec::new(polynomial_space(2, 1, 1.0), vec![vec![0.3], vec![-0.2]], vec![], 1.0, 0.1, None).unwrap();
    assert_eq!(alone.conditional_canonical(0, &[0.0, 0.7]).unwrap(), vec![0.3]);
    let m = ModelSpec::new(
        polynomial_space(2, 1, 1.0),
        vec![vec![0.2], vec![0.0]],
        vec![(0, 1, EdgeBlock::new(1, vec![1.0]).unwrap())],
        1.0,
        0.2,
        None,
    )
    .unwrap();
    assert!(close(m.conditional_canonical(0, &[0.0, 0.5]).unwrap()[0], 0.7, 1e-15));
}

#[test]
fn conditional_canonical_bound() {
    for seed in 0..10 {
        let m = random_model(seed, 5, 2);
        let bound = m.theta_max() * (1.0 + (m.k() * m.d()) as f64 * m.space().phi_max());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..=1.0)).collect();
            for i in 0..5 {
                assert!(m.conditional_canonical(i, &x).unwrap().iter().all(|v| v.abs() <= bound + 1e-12));
            }
        }
    }
}

#[test]
fn conditional_density_examples() {
    let zero = ModelSpec::new(polynomial_space(2, 1, 1.0), vec![vec![0.0]; 2], vec![], 1.0, 0.1, None).unwrap();
    for xi in [-1.0, -0.3, 0.0, 0.8] {
        assert!(close(zero.conditional_density(0, xi, &[0.0, 0.4], 256).unwrap(), 0.5, 1e-13));
    }
    let m = two_node_model(1.0);
    let e = std::f64::consts::E;
    let expected = 1.0 / (e - 1.0 / e);
    assert!(close(m.conditional_density(0, 0.0, &[0.0, 1.0], 256).unwrap(), expected, 1e-12));
    assert!(close(expected, 0.4254590641196608, 1e-15));
    assert!(m.conditional_density(0, 0.0, &[0.0, 1.0], 32).is_err());
}

#[test]
fn conditional_density_normalises_and_respects_bounds() {
    for seed in 0..5 {
        let m = random_model(seed, 3, 2);
        let (lo, hi) = m.density_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..=1.0)).collect();
        for i in 0..3 {
            let total = simpson(|u| m.conditional_density(i, u, &x, 256).unwrap(), -1.0, 1.0, 2000);
            assert!(close(total, 1.0, 1e-8));
            for q in 0..=50 {
                let u = -1.0 + q as f64 / 25.0;
                let f = m.conditional_density(i, u, &x, 256).unwrap();
                assert!(lo <= f && f <= hi);
            }
        }
    }
}

#[test]
fn model_validation() {
    let space = polynomial_space(3, 1, 1.0);
    let blk = |v: f64| EdgeBlock::new(1, vec![v]).unwrap();
    let ok = ModelSpec::new(space.clone(), vec![vec![0.0]; 3], vec![(0, 1, blk(0.5)), (1, 2, blk(-0.5))], 1.0, 0.2, None).unwrap();
    assert_eq!(ok.d(), 2);
    assert!((ok.gamma() - 1.0 * (1.0 + 2.0)).abs() < 1e-15);
    assert!(ModelSpec::new(space.clone(), vec![vec![0.0]; 3], vec![(0, 1, blk(1.5))], 1.0, 0.2, None).is_err());
    assert!(ModelSpec::new(space.clone(), vec![vec![0.1]; 3], vec![], 1.0, 0.2, None).is_err());
    assert!(ModelSpec::new(space.clone(), vec![vec![0.0]; 3], vec![(0, 1, blk(0.5)), (1, 2, blk(0.5))], 1.0, 0.2, Some(1)).is_err());
    assert!(ModelSpec::new(space.clone(), vec![vec![0.0]; 3], vec![(1, 0, blk(0.5))], 1.0, 0.2, None).is_err());
    assert!(ModelSpec::new(space, vec![vec![0.0]; 2], vec![], 1.0, 0.2, None).is_err());
    assert!(Domain::new(vec![Interval::new(0.0, 1.0).unwrap()], 2.0, 3.0).is_err());
}

#[test]
fn edge_block_transpose_in_vertex_layout() {
    let space = polynomial_space(2, 2, 1.0);
    let b = EdgeBlock::from_rows(&[vec![0.2, 0.3], vec![0.4, 0.5]]).unwrap();
    let m = ModelSpec::new(space, vec![vec![0.0; 2]; 2], vec![(0, 1, b)], 1.0, 0.1, None).unwrap();
    assert_eq!(m.vertex_parameter(0).edge_block(1), &[0.2, 0.3, 0.4, 0.5]);
    assert_eq!(m.vertex_parameter(1).edge_block(0), &[0.2, 0.4, 0.3, 0.5]);
}

#[test]
fn concatenation_layout() {
    let m = chain_model(3, 0.3, &[0.25, -0.25, 0.0], 0.5, 0.2);
    assert_eq!(m.concatenated(), vec![0.25, -0.25, 0.0, 0.3, 0.0, -0.3]);
}

#[test]
fn partition_function_matches_closed_form() {
    let b = Basis::polynomial(1, 1.0).unwrap();
    let iv = Interval::new(-1.0, 1.0).unwrap();
    let z = log_partition_1d(&b, &[1.0], iv, 256);
    assert!(close(z, (1f64.exp() - (-1f64).exp()).ln(), 1e-13));
    let (mean, var) = moments_1d(&b, &[1.0], iv, 256);
    let coth = 1.0 / 1f64.tanh();
    assert!(close(mean[0], coth - 1.0, 1e-13));
    // Var = 1 − coth² + 1 for density ∝ e^x on [−1, 1].
    let second = simpson(|x| x * x * x.exp(), -1.0, 1.0, 2000) / simpson(|x| x.exp(), -1.0, 1.0, 2000);
    assert!(close(var[0], second - mean[0] * mean[0], 1e-10));
}

#[test]
fn polynomial_derivative_bound_covers_interior_degrees() {
    let basis = Basis::polynomial(3, 0.6).unwrap();
    assert!((basis.phi_bar_max() - 1.2).abs() < 1e-12);
}

proptest! {
    #[test]
    fn basis_within_bounds(k in 1usize..6, b in 0.2f64..3.0, t in -1.0f64..=1.0, harmonic in any::<bool>()) {
        let k = if harmonic { 2 * k } else { k };
        let basis = if harmonic { Basis::harmonic(k, b).unwrap() } else { Basis::polynomial(k, b).unwrap() };
        let x = t * b;
        let v = basis.eval(x).unwrap();
        prop_assert_eq!(v.len(), k);
        let mut d = vec![0.0; k];
        basis.derivative_into(x, &mut d);
        for r in 0..k {
            prop_assert!(v[r].abs() <= basis.phi_max() * (1.0 + 1e-12));
            prop_assert!(d[r].abs() <= basis.phi_bar_max() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn derivative_matches_finite_difference(k in 1usize..5, t in -0.9f64..0.9, harmonic in any::<bool>()) {
        let k = if harmonic { 2 * k } else { k };
        let basis = if harmonic { Basis::harmonic(k, 1.0).unwrap() } else { Basis::polynomial(k, 1.0).unwrap() };
        let h = 1e-6;
        let (a, b) = (basis.eval(t + h).unwrap(), basis.eval(t - h).unwrap());
        let mut d = vec![0.0; k];
        basis.derivative_into(t, &mut d);
        for r in 0..k {
            prop_assert!(((a[r] - b[r]) / (2.0 * h) - d[r]).abs() < 1e-6 * (1.0 + d[r].abs()));
        }
    }

    #[test]
    fn edge_basis_is_kronecker(k in 1usize..4, x in -1.0f64..=1.0, y in -1.0f64..=1.0) {
        let basis = Basis::polynomial(k, 1.0).unwrap();
        let e = basis.eval_edge(x, y).unwrap();
        let (fx, fy) = (basis.eval(x).unwrap(), basis.eval(y).unwrap());
        for r in 0..k {
            for s in 0..k {
                prop_assert_eq!(e[r * k + s], fx[r] * fy[s]);
            }
        }
    }

    #[test]
    fn vertex_parameter_blocks_partition_vector(p in 1usize..6, k in 1usize..4, node in 0usize..6) {
        let node = node % p;
        let n = vertex_dim(p, k);
        let v = VertexParameter::new(node, p, k, (0..n).map(|q| q as f64).collect()).unwrap();
        let mut seen = v.node_block().to_vec();
        for j in (0..p).filter(|&j| j != node) {
            seen.extend_from_slice(v.edge_block(j));
        }
        prop_assert_eq!(seen, v.values().to_vec());
    }
}
