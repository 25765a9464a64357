//! Distortion metrics and bitrate accounting in bits per vertex per frame.

use std::io::Write;

use crate::codec::CompressedAnimation;
use crate::error::{dim_mismatch, Error, Result};
use crate::graph::build_connectivity;
use crate::laplacian::{build_laplacian_with, LaplacianKind, LaplacianMatrix};
use crate::mesh::MeshSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// The closed-form rate model from the paper's tables.
    PaperFormula,
    /// Bits actually present in a stream.
    ExactBits,
}

/// Rates in bits per vertex per frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub q: f64,
    pub q_a: f64,
    pub q_d: f64,
    /// Header, ranges, means, indices and padding; zero in paper mode.
    pub auxiliary: f64,
    pub q_s: f64,
    pub mode: RateMode,
}

/// Closed-form rate model.
///
/// `bits` is the average bit depth per coefficient-matrix element, so the
/// coefficient rate equals it. `n_c` may be fractional (e.g. `0.01 * n`).
/// The dictionary term keeps the `n_b²·k_f²` factor exactly as published,
/// which equals `k²` for any block count.
#[allow(clippy::too_many_arguments)]
pub fn rate_paper_formula(
    n: usize,
    k: usize,
    n_b: usize,
    k_f: usize,
    n_c: f64,
    bits: f64,
    bits_a: f64,
    bits_d: f64,
) -> RateReport {
    let nk = (n * k) as f64;
    let q = bits * nk / nk;
    let q_a = bits_a * n_c * k as f64 / nk;
    let q_d = bits_d * (n_b * n_b * k_f * k_f) as f64 / nk;
    RateReport {
        q,
        q_a,
        q_d,
        auxiliary: 0.0,
        q_s: q + q_a + q_d,
        mode: RateMode::PaperFormula,
    }
}

/// Accounts for every byte of `c.to_bytes()`.
pub fn rate_exact(c: &CompressedAnimation) -> RateReport {
    let bits = c.section_bits();
    let nk = (c.header.n * c.header.k) as f64;
    let q = bits.coefficients as f64 / nk;
    let q_a = bits.anchors as f64 / nk;
    let q_d = bits.dictionaries as f64 / nk;
    let auxiliary = bits.auxiliary() as f64 / nk;
    RateReport {
        q,
        q_a,
        q_d,
        auxiliary,
        q_s: bits.total as f64 / nk,
        mode: RateMode::ExactBits,
    }
}

fn check_shapes(a: &MeshSequence, b: &MeshSequence) -> Result<()> {
    if (a.n(), a.k()) != (b.n(), b.k()) {
        return Err(dim_mismatch(format!(
            "sequences are {}x{} and {}x{} (vertices x frames)",
            a.n(),
            a.k(),
            b.n(),
            b.k()
        )));
    }
    Ok(())
}

fn dist(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

/// Per-frame root mean squared vertex distance.
pub fn frame_rms(orig: &MeshSequence, recon: &MeshSequence) -> Result<Vec<f64>> {
    check_shapes(orig, recon)?;
    let n = orig.n() as f64;
    Ok(orig
        .frames()
        .iter()
        .zip(recon.frames())
        .map(|(a, b)| {
            let sq: f64 = a.iter().zip(b).map(|(p, q)| dist(p, q).powi(2)).sum();
            (sq / n).sqrt()
        })
        .collect())
}

/// Root mean squared vertex distance over the whole sequence.
pub fn sequence_rms(orig: &MeshSequence, recon: &MeshSequence) -> Result<f64> {
    let per_frame = frame_rms(orig, recon)?;
    Ok((per_frame.iter().map(|r| r * r).sum::<f64>() / per_frame.len() as f64).sqrt())
}

fn apply_axes(l: &LaplacianMatrix, frame: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; frame.len()];
    for c in 0..3 {
        let col: Vec<f64> = frame.iter().map(|p| p[c]).collect();
        for (o, v) in out.iter_mut().zip(l.apply(&col)) {
            o[c] = v;
        }
    }
    out
}

/// Per-frame normalized mean square visual error:
/// `(1/2n) Σ_i (‖v_i − ṽ_i‖ + ‖GL(v_i) − GL(ṽ_i)‖)`, where `GL` maps a vertex
/// to its offset from the mean of its neighbors.
///
/// Uses `l` (expected to be the degree-normalized Laplacian of the shared
/// connectivity) for the geometric term.
pub fn nmsve(orig: &MeshSequence, recon: &MeshSequence, l: &LaplacianMatrix) -> Result<Vec<f64>> {
    check_shapes(orig, recon)?;
    if l.n() != orig.n() {
        return Err(dim_mismatch(format!("Laplacian is {0}x{0}, meshes have {1} vertices", l.n(), orig.n())));
    }
    let n = orig.n() as f64;
    Ok(orig
        .frames()
        .iter()
        .zip(recon.frames())
        .map(|(a, b)| {
            let (ga, gb) = (apply_axes(l, a), apply_axes(l, b));
            let pos: f64 = a.iter().zip(b).map(|(p, q)| dist(p, q)).sum();
            let geo: f64 = ga.iter().zip(&gb).map(|(p, q)| dist(p, q)).sum();
            (pos + geo) / (2.0 * n)
        })
        .collect())
}

/// The Laplacian used by [`nmsve`] for a sequence.
pub fn nmsve_laplacian(s: &MeshSequence) -> Result<LaplacianMatrix> {
    Ok(build_laplacian_with(
        &build_connectivity(s.faces(), s.n())?,
        LaplacianKind::Normalized,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub frame_rms: Vec<f64>,
    pub frame_nmsve: Vec<f64>,
    pub mean_rms: f64,
    pub mean_nmsve: f64,
    /// Per vertex, the distance to the original averaged over frames.
    pub vertex_error: Vec<f64>,
}

pub fn distortion(orig: &MeshSequence, recon: &MeshSequence) -> Result<DistortionReport> {
    check_shapes(orig, recon)?;
    if orig.faces() != recon.faces() {
        return Err(Error::ConnectivityMismatch { frame: 0 });
    }
    let frame_rms = frame_rms(orig, recon)?;
    let frame_nmsve = nmsve(orig, recon, &nmsve_laplacian(orig)?)?;
    let k = orig.k() as f64;
    let mut vertex_error = vec![0.0; orig.n()];
    for (a, b) in orig.frames().iter().zip(recon.frames()) {
        for (e, (p, q)) in vertex_error.iter_mut().zip(a.iter().zip(b)) {
            *e += dist(p, q) / k;
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(DistortionReport {
        mean_rms: mean(&frame_rms),
        mean_nmsve: mean(&frame_nmsve),
        frame_rms,
        frame_nmsve,
        vertex_error,
    })
}

impl DistortionReport {
    /// `frame,rms,nmsve`
    pub fn write_frame_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["frame", "rms", "nmsve"])?;
        for (f, (r, v)) in self.frame_rms.iter().zip(&self.frame_nmsve).enumerate() {
            out.write_record([f.to_string(), r.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// `vertex,mean_error`
    pub fn write_vertex_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["vertex", "mean_error"])?;
        for (i, e) in self.vertex_error.iter().enumerate() {
            out.write_record([i.to_string(), e.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}
