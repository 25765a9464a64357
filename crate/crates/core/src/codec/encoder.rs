use nalgebra::DMatrix;
use rayon::prelude::*;

use super::anchors::{select_anchors, AnchorPayload};
use super::config::{EncoderConfig, Variant};
use super::dictionary::encode_dictionaries;
use super::quant::quantize_rows;
use super::stream::{AxisSection, CompressedAnimation, Header};
use crate::error::{Error, Result};
use crate::graph::{Connectivity, Face};
use crate::laplacian::{build_laplacian, build_laplacian_with, delta_coordinates, LaplacianKind};
use crate::mesh::{validate_sequence, Axis, MeshSequence};
use crate::spectral::{
    autocorrelation, full_eigenbasis, gft_project, orthogonal_iterations_with, symmetric_eigen,
    align_signs, procrustes_align, OiOptions, TrajectoryDictionary,
};

/// Bit depths used when a representation is quantized.
#[derive(Debug, Clone, PartialEq)]
pub struct BitBudget {
    pub rows: Vec<u8>,
    pub anchor: u8,
    pub dict: u8,
    pub diff: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisRepresentation {
    /// One per block; empty for the per-mesh baseline.
    pub dictionaries: Vec<TrajectoryDictionary>,
    /// One `k_l × row_len` matrix per block.
    pub coefficients: Vec<DMatrix<f64>>,
    pub means: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    pub indices: Vec<usize>,
    /// Per axis, `n_c × k` (anchor × frame).
    pub values: [DMatrix<f64>; 3],
}

/// Everything the decoder needs, before (or after) quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub variant: Variant,
    pub laplacian: LaplacianKind,
    pub n: usize,
    pub k: usize,
    pub n_b: usize,
    pub pad: usize,
    pub k_l: usize,
    pub bits: BitBudget,
    pub faces: Vec<Face>,
    pub axes: [AxisRepresentation; 3],
    pub anchors: Option<AnchorSet>,
}

impl Representation {
    pub fn k_f(&self) -> usize {
        (self.k + self.pad) / self.n_b
    }
}

/// Eigenbasis of the combinatorial Laplacian, lowest graph frequency first.
pub fn laplacian_eigenbasis(conn: &Connectivity) -> Result<DMatrix<f64>> {
    let dense = build_laplacian(conn).to_dense();
    let (_, vectors) = symmetric_eigen(&dense)?;
    let n = vectors.ncols();
    Ok(DMatrix::from_fn(n, n, |i, j| vectors[(i, n - 1 - j)]))
}

fn pad_frames(a: &DMatrix<f64>, pad: usize) -> DMatrix<f64> {
    if pad == 0 {
        return a.clone();
    }
    let (k, n) = a.shape();
    DMatrix::from_fn(k + pad, n, |f, i| a[(f.min(k - 1), i)])
}

fn frame_means(a: &DMatrix<f64>) -> Vec<f64> {
    a.row_iter().map(|r| r.mean()).collect()
}

/// Per-block dictionaries for one axis: a direct eigensolve for the first
/// block, warm-started orthogonal iterations for the rest, each sign-aligned
/// with its predecessor.
pub fn block_dictionaries(
    a: &DMatrix<f64>,
    n_b: usize,
    oi: OiOptions,
) -> Result<Vec<TrajectoryDictionary>> {
    let k_f = a.nrows() / n_b;
    let mut dicts: Vec<TrajectoryDictionary> = Vec::with_capacity(n_b);
    for b in 0..n_b {
        let block = a.rows(b * k_f, k_f).into_owned();
        let r = autocorrelation(&block)?;
        let dict = match dicts.last() {
            None => full_eigenbasis(&r)?,
            Some(prev) => {
                let tracked = orthogonal_iterations_with(&r, prev, oi)
                    .map_err(|e| match e {
                        Error::RankDeficiency { column, .. } => {
                            Error::RankDeficiency { block: b, column }
                        }
                        other => other,
                    })?
                    .dictionary;
                let aligned = align_signs(prev, &tracked)?;
                let rayleigh = aligned.basis().tr_mul(&(&r * aligned.basis())).diagonal();
                TrajectoryDictionary::new(aligned.into_basis(), Some(rayleigh))
            }
        };
        dicts.push(dict);
    }
    Ok(dicts)
}

/// Energy below this fraction of the largest eigenvalue is treated as
/// numerically absent when choosing a block's basis.
const NEGLIGIBLE_ENERGY: f64 = 1e-12;

/// Leading columns (at most `k_l`) that carry non-negligible energy. The
/// remaining retained columns span directions the signal does not use, so
/// the encoder may pick any orthonormal completion for them.
fn significant_columns(d: &TrajectoryDictionary, k_l: usize) -> usize {
    let Some(ev) = d.eigenvalues() else {
        return k_l;
    };
    let top = ev.iter().cloned().fold(0.0, f64::max);
    ev.iter()
        .take(k_l)
        .take_while(|&&v| v > NEGLIGIBLE_ENERGY * top)
        .count()
}

/// Runs the transform pipeline without quantization.
pub fn analyze(s: &MeshSequence, cfg: &EncoderConfig) -> Result<Representation> {
    validate_sequence(s).into_result()?;
    let (n, k) = (s.n(), s.k());
    cfg.validate(n, k)?;
    let (_k_f, pad) = cfg.block_layout(k)?;
    let conn = s.connectivity()?;
    let l = build_laplacian_with(&conn, cfg.laplacian);
    let variant = cfg.variant;
    let k_l = cfg.k_l;

    let spatial = if variant == Variant::PerMeshGft {
        Some(laplacian_eigenbasis(&conn)?)
    } else {
        None
    };
    let oi = OiOptions {
        t_max: cfg.t_max,
        tol: cfg.oi_tol,
    };

    let axes: Vec<AxisRepresentation> = Axis::ALL
        .par_iter()
        .map(|&axis| -> Result<AxisRepresentation> {
            let a = s.axis_matrix(axis);
            let means = variant.uses_means().then(|| frame_means(&a));
            if let Some(phi) = &spatial {
                let delta = delta_coordinates(&l, &a)?;
                let coeff = phi.columns(0, k_l).tr_mul(&delta);
                return Ok(AxisRepresentation {
                    dictionaries: Vec::new(),
                    coefficients: vec![coeff],
                    means,
                });
            }
            let a = pad_frames(&a, pad);
            let mut dictionaries = block_dictionaries(&a, cfg.n_b, oi)?;
            if cfg.align_subspaces {
                for b in 1..dictionaries.len() {
                    let keep = significant_columns(&dictionaries[b], k_l);
                    let aligned = procrustes_align(dictionaries[b - 1].basis(), &dictionaries[b], keep)?;
                    dictionaries[b] = aligned;
                }
            }
            let k_f = a.nrows() / cfg.n_b;
            let coefficients = dictionaries
                .iter()
                .enumerate()
                .map(|(b, u)| {
                    let block = a.rows(b * k_f, k_f).into_owned();
                    let signal = if variant == Variant::V2v {
                        block
                    } else {
                        delta_coordinates(&l, &block)?.transpose()
                    };
                    let c = gft_project(u, &signal)?;
                    Ok(c.rows(0, k_l).into_owned())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AxisRepresentation {
                dictionaries,
                coefficients,
                means,
            })
        })
        .collect::<Result<_>>()?;

    let anchors = if variant.uses_anchors() {
        let indices = select_anchors(n, cfg.anchor_count(n), cfg.anchor_strategy, cfg.seed)?;
        let values = Axis::ALL.map(|axis| {
            let a = s.axis_matrix(axis);
            DMatrix::from_fn(indices.len(), k, |j, f| a[(f, indices[j])])
        });
        Some(AnchorSet { indices, values })
    } else {
        None
    };

    let rows = if variant == Variant::Pca {
        vec![16; k_l]
    } else {
        cfg.row_bits.resolve(k_l)?
    };

    Ok(Representation {
        variant,
        laplacian: cfg.laplacian,
        n,
        k,
        n_b: cfg.n_b,
        pad,
        k_l,
        bits: BitBudget {
            rows,
            anchor: cfg.anchor_bits,
            dict: cfg.dict_bits,
            diff: cfg.diff_bits,
        },
        faces: s.faces().to_vec(),
        axes: axes.try_into().unwrap(),
        anchors,
    })
}

/// Quantizes a representation into a stream.
///
/// If closed-loop dictionary coding detects a sign flip against the decoded
/// previous block, the offending dictionary column and its coefficient row
/// are negated together and coding is retried.
pub fn quantize(repr: &Representation) -> Result<CompressedAnimation> {
    let bits = &repr.bits;
    let axes = repr
        .axes
        .iter()
        .map(|axis| -> Result<AxisSection> {
            let mut dicts = axis.dictionaries.clone();
            let mut coefficients = axis.coefficients.clone();
            let dictionary = if dicts.is_empty() {
                None
            } else {
                let mut flips = 0;
                loop {
                    match encode_dictionaries(&dicts, bits.dict, bits.diff) {
                        Ok(p) => break Some(p),
                        Err(Error::SignMisalignment { block, column, .. }) if flips < dicts.len() * dicts[0].dim() => {
                            flips += 1;
                            let mut u = dicts[block].basis().clone();
                            u.column_mut(column).neg_mut();
                            dicts[block] = TrajectoryDictionary::new(u, dicts[block].eigenvalues().cloned());
                            if column < coefficients[block].nrows() {
                                coefficients[block].row_mut(column).neg_mut();
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
            };
            let coefficients = coefficients
                .iter()
                .map(|c| quantize_rows(c, repr.k_l, &bits.rows))
                .collect::<Result<Vec<_>>>()?;
            let means = axis
                .means
                .as_ref()
                .map(|m| m.iter().map(|&v| v as f32).collect());
            Ok(AxisSection {
                dictionary,
                coefficients,
                means,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let anchors = repr
        .anchors
        .as_ref()
        .map(|a| AnchorPayload::quantize(&a.indices, &a.values, bits.anchor));

    let header = Header {
        variant: repr.variant,
        laplacian: repr.laplacian,
        n: repr.n,
        k: repr.k,
        n_b: repr.n_b,
        pad: repr.pad,
        k_l: repr.k_l,
        n_c: anchors.as_ref().map_or(0, |a| a.n_c()),
        anchor_bits: bits.anchor,
        dict_bits: bits.dict,
        diff_bits: bits.diff,
    };
    Ok(CompressedAnimation {
        header,
        faces: repr.faces.clone(),
        axes: axes.try_into().unwrap(),
        anchors,
    })
}

pub fn encode(s: &MeshSequence, cfg: &EncoderConfig) -> Result<CompressedAnimation> {
    quantize(&analyze(s, cfg)?)
}
