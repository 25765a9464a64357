use nalgebra::DMatrix;

use crate::error::{dim_mismatch, Result};

/// Largest principal angle (radians, in `[0, π/2]`) between the column spans
/// of two orthonormal-column matrices of equal shape.
///
/// Small angles come from `asin` of the spectral norm of `(I - UUᵀ)V`, large
/// ones from `acos` of the smallest singular value of `UᵀV`; each form is
/// accurate where the other loses digits.
pub fn subspace_angle(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(dim_mismatch(format!(
            "subspace_angle: {:?} vs {:?}",
            u.shape(),
            v.shape()
        )));
    }
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let utv = u.tr_mul(v);
    let residual = v - u * &utv;
    let sin_max = residual
        .singular_values()
        .iter()
        .copied()
        .fold(0.0f64, f64::max)
        .min(1.0);
    if sin_max < 0.7 {
        return Ok(sin_max.asin());
    }
    let cos_min = utv
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0);
    Ok(cos_min.acos())
}
