use nalgebra::DMatrix;

use super::TrajectoryDictionary;
use crate::error::{dim_mismatch, Result};

/// `Uᵀ K`: coefficients of `K` in the dictionary basis.
pub fn gft_project(u: &TrajectoryDictionary, k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if u.dim() != k.nrows() {
        return Err(dim_mismatch(format!(
            "dictionary is {0}x{0}, signal has {1} rows",
            u.dim(),
            k.nrows()
        )));
    }
    Ok(u.basis().tr_mul(k))
}

/// `U C`: inverse of [`gft_project`] for an orthonormal dictionary.
pub fn gft_unproject(u: &TrajectoryDictionary, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if u.dim() != c.nrows() {
        return Err(dim_mismatch(format!(
            "dictionary is {0}x{0}, coefficients have {1} rows",
            u.dim(),
            c.nrows()
        )));
    }
    Ok(u.basis() * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{autocorrelation, full_eigenbasis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_dictionary() {
        let x = DMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        let id = TrajectoryDictionary::identity(3);
        assert_eq!(gft_project(&id, &x).unwrap(), x);
        assert_eq!(gft_unproject(&id, &x).unwrap(), x);
    }

    #[test]
    fn rank_one_unprojection() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DMatrix::from_fn(4, 9, |_, _| rng.random::<f64>());
        let u = full_eigenbasis(&autocorrelation(&a).unwrap()).unwrap();
        let mut c = DMatrix::zeros(4, 5);
        c.row_mut(0).copy_from_slice(&[1.0, -2.0, 0.5, 3.0, 0.0]);
        let out = gft_unproject(&u, &c).unwrap();
        let outer = u.basis().column(0) * c.row(0);
        assert!((out - outer).abs().max() < 1e-15);
    }

    #[test]
    fn projection_round_trip_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(6, 20, |_, _| rng.random_range(-1.0..1.0));
        let u = full_eigenbasis(&autocorrelation(&a).unwrap()).unwrap();
        let x = DMatrix::from_fn(6, 11, |_, _| rng.random_range(-5.0..5.0));
        let c = gft_project(&u, &x).unwrap();
        assert!(((c.norm() - x.norm()) / x.norm()).abs() < 1e-10);
        let back = gft_unproject(&u, &c).unwrap();
        assert!((back - &x).norm() / x.norm() < 1e-10);
    }

    #[test]
    fn dimension_checks() {
        let u = TrajectoryDictionary::identity(3);
        assert!(gft_project(&u, &DMatrix::zeros(4, 2)).is_err());
        assert!(gft_unproject(&u, &DMatrix::zeros(2, 2)).is_err());
    }
}
