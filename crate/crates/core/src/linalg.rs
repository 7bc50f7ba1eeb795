//! Small dense symmetric-matrix kernels shared across the crate.
//!
//! Everything here works on `nalgebra` dynamic matrices. Dimensions are
//! small (ambient spaces of a few dozen at most), so all factorizations go
//! through explicit symmetrization followed by a dense symmetric
//! eigensolver; no iterative or blocked paths.

use nalgebra::{DMatrix, DVector};

/// Relative threshold under which a singular value or eigenvalue counts as zero.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Symmetric part `(m + mᵀ)/2`.
pub fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

/// Largest absolute entry of `m - mᵀ`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    dev
}

/// Eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized first. Returns eigenvalues in descending order
/// with the eigenvector columns aligned to them; the eigenvector matrix is
/// orthogonal.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = symmetrized(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Number of entries whose magnitude exceeds `rel_tol` times the largest magnitude.
pub fn numerical_rank(values: &DVector<f64>, rel_tol: f64) -> usize {
    let max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|v| v.abs() > rel_tol * max).count()
}

/// Rank of an arbitrary matrix from its singular values, at [`RANK_REL_TOL`].
pub fn matrix_rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    numerical_rank(&DVector::from_column_slice(sv.as_slice()), RANK_REL_TOL)
}

/// Rebuilds `V f(Λ) Vᵀ` from an eigendecomposition.
pub fn spectral_map(
    eigenvalues: &DVector<f64>,
    eigenvectors: &DMatrix<f64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<f64> {
    let scaled = DMatrix::from_diagonal(&eigenvalues.map(f));
    eigenvectors * scaled * eigenvectors.transpose()
}

/// Symmetric square root of a PSD matrix; negative round-off eigenvalues clamp to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    spectral_map(&vals, &vecs, |l| l.max(0.0).sqrt())
}

/// Frobenius distance `‖a − b‖_F`.
pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}
