use nalgebra::DMatrix;

/// Orthonormal factor of a Householder QR of an `m × p` matrix (`m ≥ p`),
/// plus the diagonal of `R`.
///
/// A column that is already zero below the diagonal gets an identity
/// reflector, so `Q` stays orthonormal for rank-deficient input. Columns of
/// `Q` are oriented so that `diag(R) ≥ 0`.
pub fn householder_q(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let (m, p) = a.shape();
    assert!(m >= p, "householder_q needs a tall or square matrix");
    let mut work = a.clone();
    let mut axes: Vec<Option<Vec<f64>>> = Vec::with_capacity(p);
    let mut rdiag = Vec::with_capacity(p);

    for j in 0..p {
        let x: Vec<f64> = (j..m).map(|i| work[(i, j)]).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            axes.push(None);
            rdiag.push(0.0);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            axes.push(None);
            rdiag.push(alpha);
            continue;
        }
        v.iter_mut().for_each(|t| *t /= vnorm);
        for c in j..p {
            let dot: f64 = (j..m).map(|i| v[i - j] * work[(i, c)]).sum();
            for i in j..m {
                work[(i, c)] -= 2.0 * v[i - j] * dot;
            }
        }
        rdiag.push(work[(j, j)]);
        axes.push(Some(v));
    }

    let mut q = DMatrix::<f64>::identity(m, p);
    for j in (0..p).rev() {
        if let Some(v) = &axes[j] {
            for c in 0..p {
                let dot: f64 = (j..m).map(|i| v[i - j] * q[(i, c)]).sum();
                if dot != 0.0 {
                    for i in j..m {
                        q[(i, c)] -= 2.0 * v[i - j] * dot;
                    }
                }
            }
        }
    }
    for (j, d) in rdiag.iter_mut().enumerate() {
        if *d < 0.0 {
            q.column_mut(j).neg_mut();
            *d = -*d;
        }
    }
    (q, rdiag)
}
