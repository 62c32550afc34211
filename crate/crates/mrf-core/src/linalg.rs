//! Small dense symmetric-matrix helpers over `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

fn matrix(a: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, a)
}

/// Eigenvalues of a symmetric row-major `n × n` matrix, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(matrix(a, n)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Inverse of a row-major `n × n` matrix, `None` when singular.
pub fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let inv = matrix(a, n).try_inverse()?;
    Some(row_major(&inv))
}

/// Two-norm condition number from singular values.
pub fn condition_number(a: &[f64], n: usize) -> f64 {
    let sv = matrix(a, n).singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Row-major product `a · b` of `n × n` matrices.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    row_major(&(matrix(a, n) * matrix(b, n)))
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}
