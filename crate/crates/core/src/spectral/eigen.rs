use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{canonicalize_signs, TrajectoryDictionary};
use crate::error::{dim_mismatch, Error, Result};

/// `R = A Aᵀ`, symmetrized to remove round-off asymmetry.
pub fn autocorrelation(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(dim_mismatch("autocorrelation of an empty matrix"));
    }
    let r = a * a.transpose();
    Ok((&r + r.transpose()) * 0.5)
}

/// Symmetric eigendecomposition sorted by descending eigenvalue, with
/// canonical column signs. Returns `(eigenvalues, eigenvectors)`.
pub fn symmetric_eigen(r: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if !r.is_square() {
        return Err(dim_mismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let m = r.nrows();
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure("matrix has non-finite entries".into()));
    }
    let max_iter = 1000 * m.max(10);
    let eig = SymmetricEigen::try_new(r.clone(), f64::EPSILON, max_iter).ok_or_else(|| {
        Error::ConvergenceFailure(format!("no convergence within {max_iter} sweeps"))
    })?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(m, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    canonicalize_signs(&mut vectors);

    let norm = r.norm();
    if norm > 0.0 {
        let recon = &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
        let residual = (recon - r).norm() / norm;
        if !(residual < 1e-6) {
            return Err(Error::ConvergenceFailure(format!(
                "reconstruction residual {residual:.3e}"
            )));
        }
    }
    Ok((values, vectors))
}

/// Full eigen-trajectory basis of an autocorrelation matrix. Round-off
/// negatives in the spectrum are clamped to zero.
pub fn full_eigenbasis(r: &DMatrix<f64>) -> Result<TrajectoryDictionary> {
    let (mut values, vectors) = symmetric_eigen(r)?;
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(TrajectoryDictionary::new(vectors, Some(values)))
}
