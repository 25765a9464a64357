//! Graph Laplacian `L = D - C` and differential (delta) coordinates.

use nalgebra::DMatrix;

use crate::error::{dim_mismatch, Result};
use crate::graph::Connectivity;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianKind {
    /// Degree on the diagonal, -1 per neighbor.
    #[default]
    Combinatorial,
    /// Combinatorial rows scaled by `1/d_i`: vertex minus neighbor mean.
    Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    kind: LaplacianKind,
    degrees: Vec<usize>,
    csr: CsrMatrix,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.csr.get(i, j)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.csr.to_dense()
    }

    /// `y = L x` for a single vertex signal.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.csr.mul_vec(x, &mut y);
        y
    }
}

pub fn build_laplacian(c: &Connectivity) -> LaplacianMatrix {
    build_laplacian_with(c, LaplacianKind::Combinatorial)
}

pub fn build_laplacian_with(c: &Connectivity, kind: LaplacianKind) -> LaplacianMatrix {
    let degrees = c.degrees();
    let rows = (0..c.n())
        .map(|i| {
            let d = degrees[i] as f64;
            let scale = match kind {
                LaplacianKind::Combinatorial => 1.0,
                LaplacianKind::Normalized => 1.0 / d,
            };
            let mut row = Vec::with_capacity(degrees[i] + 1);
            row.push((i, d * scale));
            row.extend(c.neighbors(i).iter().map(|&j| (j as usize, -scale)));
            row
        })
        .collect();
    LaplacianMatrix {
        kind,
        csr: CsrMatrix::from_rows(c.n(), rows),
        degrees,
    }
}

/// `δ = L Aᵀ` for a `k × n` trajectory matrix; returns `n × k`.
pub fn delta_coordinates(l: &LaplacianMatrix, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (k, n) = a.shape();
    if n != l.n() {
        return Err(dim_mismatch(format!(
            "trajectory matrix has {n} columns, Laplacian is {0}x{0}",
            l.n()
        )));
    }
    let at = a.transpose();
    let mut delta = DMatrix::zeros(n, k);
    for f in 0..k {
        l.csr.mul_vec(at.column(f).as_slice(), delta.column_mut(f).as_mut_slice());
    }
    Ok(delta)
}
