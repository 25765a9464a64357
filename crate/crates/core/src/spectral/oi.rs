use nalgebra::DMatrix;

use super::{canonicalize_signs, householder_q, TrajectoryDictionary};
use crate::error::{dim_mismatch, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OiOptions {
    /// Iteration budget; the warm start counts as iterate 1, so at most
    /// `t_max - 1` QR updates are applied.
    pub t_max: usize,
    /// Stop early once no column moves by more than this angle (radians).
    pub tol: Option<f64>,
}

impl Default for OiOptions {
    fn default() -> Self {
        Self { t_max: 4, tol: None }
    }
}

#[derive(Debug, Clone)]
pub struct OiOutcome {
    pub dictionary: TrajectoryDictionary,
    /// QR updates actually applied.
    pub updates: usize,
}

/// Warm-started orthogonal iterations `U ← Q(R U)` with exactly `t_max - 1`
/// updates. Canonical signs are applied to the result.
pub fn orthogonal_iterations(
    r: &DMatrix<f64>,
    init: &TrajectoryDictionary,
    t_max: usize,
) -> Result<TrajectoryDictionary> {
    orthogonal_iterations_with(r, init, OiOptions { t_max, tol: None }).map(|o| o.dictionary)
}

pub fn orthogonal_iterations_with(
    r: &DMatrix<f64>,
    init: &TrajectoryDictionary,
    opts: OiOptions,
) -> Result<OiOutcome> {
    let m = init.dim();
    if r.shape() != (m, m) {
        return Err(dim_mismatch(format!(
            "autocorrelation is {}x{}, initial dictionary is {m}x{m}",
            r.nrows(),
            r.ncols()
        )));
    }
    if opts.t_max == 0 {
        return Err(Error::InvalidConfig("t_max must be at least 1".into()));
    }

    let mut u = init.basis().clone();
    let mut updates = 0;
    for _ in 1..opts.t_max {
        let ru = r * &u;
        if let Some(pos) = ru.iter().position(|v| !v.is_finite()) {
            return Err(Error::RankDeficiency {
                block: 0,
                column: pos / m,
            });
        }
        let (q, _) = householder_q(&ru);
        updates += 1;
        let converged = opts
            .tol
            .is_some_and(|tol| max_column_motion(&u, &q) < tol);
        u = q;
        if converged {
            break;
        }
    }
    canonicalize_signs(&mut u);
    Ok(OiOutcome {
        dictionary: TrajectoryDictionary::new(u, None),
        updates,
    })
}

fn max_column_motion(prev: &DMatrix<f64>, cur: &DMatrix<f64>) -> f64 {
    prev.column_iter()
        .zip(cur.column_iter())
        .map(|(a, b)| a.dot(&b).abs().min(1.0).acos())
        .fold(0.0, f64::max)
}

/// Flips columns of `cur` whose inner product with the matching column of
/// `prev` is negative.
pub fn align_signs(
    prev: &TrajectoryDictionary,
    cur: &TrajectoryDictionary,
) -> Result<TrajectoryDictionary> {
    if prev.dim() != cur.dim() {
        return Err(dim_mismatch(format!(
            "align_signs: {0}x{0} vs {1}x{1}",
            prev.dim(),
            cur.dim()
        )));
    }
    let mut u = cur.basis().clone();
    for (p, mut c) in prev.basis().column_iter().zip(u.column_iter_mut()) {
        if p.dot(&c) < 0.0 {
            c.neg_mut();
        }
    }
    Ok(TrajectoryDictionary::new(u, cur.eigenvalues().cloned()))
}

/// Rotates `cur` within the span of its first `split` columns, and
/// separately within the span of the rest, to sit as close as possible
/// (Frobenius) to the matching columns of `prev`.
///
/// Both spans are preserved, so truncating to `split` columns keeps exactly
/// the same subspace; only the basis inside it changes. Sign flips are the
/// special case of a diagonal rotation.
pub fn procrustes_align(
    prev: &DMatrix<f64>,
    cur: &TrajectoryDictionary,
    split: usize,
) -> Result<TrajectoryDictionary> {
    let m = cur.dim();
    if prev.shape() != (m, m) {
        return Err(dim_mismatch(format!(
            "procrustes_align: {}x{} vs {m}x{m}",
            prev.nrows(),
            prev.ncols()
        )));
    }
    let split = split.min(m);
    let mut u = cur.basis().clone();
    for (start, len) in [(0, split), (split, m - split)] {
        if len == 0 {
            continue;
        }
        let v = u.columns(start, len).into_owned();
        let target = prev.columns(start, len);
        let svd = (v.tr_mul(&target)).svd(true, true);
        let (Some(x), Some(yt)) = (svd.u, svd.v_t) else {
            return Err(Error::ConvergenceFailure("procrustes SVD".into()));
        };
        u.columns_mut(start, len).copy_from(&(v * x * yt));
    }
    Ok(TrajectoryDictionary::new(u, None))
}


#[cfg(test)]
mod procrustes_tests {
    use super::*;
    use crate::spectral::subspace_angle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_rotated_basis_and_keeps_spans() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = 7;
        let prev = householder_q(&DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0))).0;
        // Mix the first 3 columns among themselves and the last 4 likewise.
        let r1 = householder_q(&DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0))).0;
        let r2 = householder_q(&DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0))).0;
        let mut cur = prev.clone();
        cur.columns_mut(0, 3).copy_from(&(prev.columns(0, 3) * &r1));
        cur.columns_mut(3, 4).copy_from(&(prev.columns(3, 4) * &r2));
        let cur = TrajectoryDictionary::new(cur, None);
        let out = procrustes_align(&prev, &cur, 3).unwrap();
        assert!((out.basis() - &prev).amax() < 1e-12);
        assert!(out.orthonormality_error() < 1e-12);
        assert!(subspace_angle(&out.leading(3), &cur.leading(3)).unwrap() < 1e-12);
    }

    #[test]
    fn generalizes_sign_alignment() {
        let prev = DMatrix::<f64>::identity(3, 3);
        let cur = TrajectoryDictionary::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, -1.0])), None);
        let out = procrustes_align(&prev, &cur, 1).unwrap();
        assert!((out.basis() - &prev).amax() < 1e-14);
    }
}
