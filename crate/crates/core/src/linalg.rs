//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

pub type Matrix = DMatrix<f64>;

/// Builds a matrix from row-major nested rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(invalid("ragged matrix rows"));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("matrix contains a non-finite entry"));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn symmetric_eigen_bounds(m: &Matrix) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

pub fn spectral_radius(m: &Matrix) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// `eᵀ M e` without allocating.
#[inline]
pub fn quad_form(m: &Matrix, e: &[f64]) -> f64 {
    let n = e.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m[(i, j)] * e[j];
        }
        acc += e[i] * row;
    }
    acc
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symmetric square root of the inverse of an SPD matrix, `P^{-1/2}`.
pub fn inverse_sqrt_spd(p: &Matrix) -> Matrix {
    let eig = p.clone().symmetric_eigen();
    let d = Matrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Solves the discrete Lyapunov equation `AᵀPA − P = −Q` through its
/// Kronecker-product linear system. Returns `None` when singular, which
/// happens iff `A` has a pair of eigenvalues with product 1.
pub fn discrete_lyapunov(a: &Matrix, q: &Matrix) -> Option<Matrix> {
    let n = a.nrows();
    let at = a.transpose();
    let kron = at.kronecker(&at) - Matrix::identity(n * n, n * n);
    // Column-major vec() on both sides.
    let rhs = nalgebra::DVector::from_iterator(n * n, q.iter().map(|v| -v));
    let sol = kron.lu().solve(&rhs)?;
    let p = Matrix::from_iterator(n, n, sol.iter().copied());
    Some((&p + p.transpose()) * 0.5)
}
