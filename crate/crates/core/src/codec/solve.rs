//! Least-squares reconstruction from delta coordinates.
//!
//! Anchored solves minimize `‖L x - δ‖² + ‖S x - a‖²` per frame, with `S`
//! selecting the anchor rows of the identity. The normal matrix `LᵀL + SᵀS`
//! is factored with an envelope Cholesky and the result is polished with a
//! few steps of iterative refinement on the stacked residual.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{dim_mismatch, Error, Result};
use crate::laplacian::LaplacianMatrix;
use crate::sparse::{CsrMatrix, EnvelopeCholesky};

const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Factor once per frame (reference path).
    Serial,
    /// Factor once, back-substitute all frames concurrently.
    #[default]
    Parallel,
}

struct AnchoredSystem<'a> {
    l: &'a CsrMatrix,
    lt: CsrMatrix,
    anchors: &'a [usize],
    normal: CsrMatrix,
}

impl<'a> AnchoredSystem<'a> {
    fn new(l: &'a LaplacianMatrix, anchors: &'a [usize]) -> Result<Self> {
        let n = l.n();
        if anchors.is_empty() {
            return Err(Error::InvalidCount("anchored solve needs at least one anchor".into()));
        }
        if let Some(&bad) = anchors.iter().find(|&&i| i >= n) {
            return Err(dim_mismatch(format!("anchor {bad} out of range for {n} vertices")));
        }
        let csr = l.csr();
        Ok(Self {
            l: csr,
            lt: csr.transpose(),
            anchors,
            normal: csr.gram().add_to_diagonal(anchors, 1.0),
        })
    }

    /// `Lᵀδ + Sᵀa`
    fn rhs(&self, delta: &[f64], anchor_vals: &[f64]) -> Vec<f64> {
        let mut b = vec![0.0; self.l.ncols()];
        self.lt.mul_vec(delta, &mut b);
        for (&i, &a) in self.anchors.iter().zip(anchor_vals) {
            b[i] += a;
        }
        b
    }

    fn solve_column(
        &self,
        chol: &EnvelopeCholesky,
        delta: &[f64],
        anchor_vals: &[f64],
    ) -> Vec<f64> {
        let mut x = self.rhs(delta, anchor_vals);
        chol.solve_in_place(&mut x);
        let n = x.len();
        let mut lx = vec![0.0; n];
        for _ in 0..REFINEMENT_STEPS {
            self.l.mul_vec(&x, &mut lx);
            let r_delta: Vec<f64> = delta.iter().zip(&lx).map(|(d, v)| d - v).collect();
            let r_anchor: Vec<f64> = self
                .anchors
                .iter()
                .zip(anchor_vals)
                .map(|(&i, &a)| a - x[i])
                .collect();
            let mut corr = self.rhs(&r_delta, &r_anchor);
            chol.solve_in_place(&mut corr);
            x.iter_mut().zip(&corr).for_each(|(xi, c)| *xi += c);
        }
        x
    }
}

/// Reconstructs an `n × k` position matrix from `n × k` delta coordinates
/// and `n_c × k` anchor values at the given vertex indices.
pub fn solve_anchored(
    l: &LaplacianMatrix,
    delta: &DMatrix<f64>,
    anchors: &[usize],
    anchor_values: &DMatrix<f64>,
    mode: SolveMode,
) -> Result<DMatrix<f64>> {
    let (n, k) = delta.shape();
    if n != l.n() {
        return Err(dim_mismatch(format!("delta has {n} rows, Laplacian is {0}x{0}", l.n())));
    }
    if anchor_values.shape() != (anchors.len(), k) {
        return Err(dim_mismatch(format!(
            "anchor values are {:?}, expected ({}, {k})",
            anchor_values.shape(),
            anchors.len()
        )));
    }
    let system = AnchoredSystem::new(l, anchors)?;
    let anchor_cols: Vec<Vec<f64>> = (0..k)
        .map(|f| anchor_values.column(f).iter().copied().collect())
        .collect();

    let columns: Vec<Vec<f64>> = match mode {
        SolveMode::Serial => (0..k)
            .map(|f| {
                let chol = EnvelopeCholesky::factor(&system.normal)?;
                Ok(system.solve_column(&chol, delta.column(f).as_slice(), &anchor_cols[f]))
            })
            .collect::<Result<_>>()?,
        SolveMode::Parallel => {
            let chol = EnvelopeCholesky::factor(&system.normal)?;
            (0..k)
                .into_par_iter()
                .map(|f| system.solve_column(&chol, delta.column(f).as_slice(), &anchor_cols[f]))
                .collect()
        }
    };

    let mut out = DMatrix::zeros(n, k);
    for (f, col) in columns.iter().enumerate() {
        out.column_mut(f).copy_from_slice(col);
    }
    Ok(out)
}

/// Anchor-free reconstruction: the least-squares solution of `L x = δ`
/// whose mean equals the given per-frame value.
///
/// Any least-squares solution differs from another by a constant, so one
/// is found with vertex 0 pinned to zero and then shifted to the target mean.
pub fn solve_mean_constrained(
    l: &LaplacianMatrix,
    delta: &DMatrix<f64>,
    means: &[f64],
) -> Result<DMatrix<f64>> {
    let (n, k) = delta.shape();
    if means.len() != k {
        return Err(dim_mismatch(format!("{} means for {k} frames", means.len())));
    }
    let mut x = solve_anchored(l, delta, &[0], &DMatrix::zeros(1, k), SolveMode::Parallel)?;
    for (f, mut col) in x.column_iter_mut().enumerate() {
        let shift = means[f] - col.sum() / n as f64;
        col.add_scalar_mut(shift);
    }
    Ok(x)
}
