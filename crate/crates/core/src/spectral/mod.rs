//! Temporal autocorrelation, eigen-trajectory dictionaries, orthogonal
//! iterations, and the graph Fourier projection.

mod angle;
mod eigen;
mod gft;
mod oi;
mod qr;

pub use angle::subspace_angle;
pub use eigen::{autocorrelation, full_eigenbasis, symmetric_eigen};
pub use gft::{gft_project, gft_unproject};
pub use oi::{align_signs, procrustes_align, orthogonal_iterations, orthogonal_iterations_with, OiOptions, OiOutcome};
pub use qr::householder_q;

use nalgebra::{DMatrix, DVector};

/// Orthonormal `m × m` temporal basis whose columns are eigen-trajectories,
/// ordered by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDictionary {
    basis: DMatrix<f64>,
    eigenvalues: Option<DVector<f64>>,
}

impl TrajectoryDictionary {
    /// Wraps a basis without checking orthonormality. Dequantized dictionaries
    /// are only approximately orthonormal and go through here.
    pub fn new(basis: DMatrix<f64>, eigenvalues: Option<DVector<f64>>) -> Self {
        debug_assert!(basis.is_square());
        Self { basis, eigenvalues }
    }

    pub fn identity(m: usize) -> Self {
        Self::new(DMatrix::identity(m, m), None)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    pub fn eigenvalues(&self) -> Option<&DVector<f64>> {
        self.eigenvalues.as_ref()
    }

    /// `max |UᵀU - I|`
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.basis)
    }

    /// Leading `p` columns.
    pub fn leading(&self, p: usize) -> DMatrix<f64> {
        self.basis.columns(0, p).into_owned()
    }
}

pub fn orthonormality_error(u: &DMatrix<f64>) -> f64 {
    let gram = u.transpose() * u;
    let p = gram.nrows();
    (gram - DMatrix::identity(p, p)).abs().max()
}

/// Flips each column so its largest-magnitude entry is non-negative
/// (first such entry on ties).
pub fn canonicalize_signs(u: &mut DMatrix<f64>) {
    for mut col in u.column_iter_mut() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &v in col.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
    }
}
