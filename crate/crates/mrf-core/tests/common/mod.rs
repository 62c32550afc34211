//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use mrf_core::{BasisFamily, BasisKind, Domain, EdgeBlock, FeatureSpace, ModelSpec};

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for q in 1..n {
        let w = if q % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + q as f64 * h);
    }
    s * h / 3.0
}

/// Two-dimensional tensor Simpson rule.
pub fn simpson2(f: impl Fn(f64, f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    simpson(|x| simpson(|y| f(x, y), a, b, n), a, b, n)
}

/// `Shi(1) = Σ 1/((2m+1)(2m+1)!)`.
pub fn shi_one() -> f64 {
    let mut s = 0.0;
    let mut fact = 1.0;
    for m in 0..20 {
        let n = 2 * m + 1;
        if m > 0 {
            fact *= ((n - 1) * n) as f64;
        }
        s += 1.0 / (n as f64 * fact);
    }
    s
}

pub fn polynomial_space(p: usize, k: usize, b: f64) -> FeatureSpace {
    FeatureSpace::new(BasisFamily::new(BasisKind::Polynomial, k).unwrap(), Domain::symmetric(p, b).unwrap()).unwrap()
}

pub fn harmonic_space(p: usize, k: usize, b: f64) -> FeatureSpace {
    FeatureSpace::new(BasisFamily::new(BasisKind::Harmonic, k).unwrap(), Domain::symmetric(p, b).unwrap()).unwrap()
}

/// Two linear variables on `[−1, 1]` coupled by a unit interaction and no node terms.
pub fn two_node_model(theta_max: f64) -> ModelSpec {
    ModelSpec::new(
        polynomial_space(2, 1, 1.0),
        vec![vec![0.0], vec![0.0]],
        vec![(0, 1, EdgeBlock::new(1, vec![1.0]).unwrap())],
        theta_max,
        0.5,
        None,
    )
    .unwrap()
}

/// Linear chain `0 − 1 − … − (p−1)` with alternating edge signs.
pub fn chain_model(p: usize, weight: f64, node: &[f64], theta_max: f64, theta_min: f64) -> ModelSpec {
    let edges = (0..p - 1)
        .map(|i| (i, i + 1, EdgeBlock::new(1, vec![if i % 2 == 0 { weight } else { -weight }]).unwrap()))
        .collect();
    let nodes = (0..p).map(|i| vec![node[i % node.len()]]).collect();
    ModelSpec::new(polynomial_space(p, 1, 1.0), nodes, edges, theta_max, theta_min, Some(2)).unwrap()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(q, &x)| {
            let c = cdf(x);
            (c - q as f64 / n).abs().max(((q + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}
