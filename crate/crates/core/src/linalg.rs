//! Small dense solves used by the basis computations. Sizes never exceed
//! `dim + 2`, so an SVD per solve is affordable and gives an honest rank test.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value floor below which a system counts as singular.
const RANK_EPS: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Solves a symmetric positive semidefinite system, returning `None` when
/// it is numerically rank deficient.
pub(crate) fn solve_full_rank(matrix: DMatrix<f64>, rhs: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
    let svd = matrix.svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if !(max_sv > 0.0) || min_sv <= RANK_EPS * max_sv {
        return None;
    }
    rhs.iter()
        .map(|b| svd.solve(b, 0.0).ok())
        .collect::<Option<Vec<_>>>()
}

/// A unit vector spanning (approximately) the null space direction of
/// `matrix` with the smallest singular value.
pub(crate) fn smallest_right_singular(matrix: DMatrix<f64>) -> Option<DVector<f64>> {
    let cols = matrix.ncols();
    // Pad to square so the SVD exposes a full right basis.
    let rows = matrix.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (matrix.nrows(), cols)).copy_from(&matrix);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t?;
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    Some(v_t.row(k).transpose())
}
