use nalgebra::DMatrix;
use rayon::prelude::*;

use super::config::Variant;
use super::dictionary::decode_dictionaries;
use super::encoder::{laplacian_eigenbasis, AnchorSet, AxisRepresentation, BitBudget, Representation};
use super::quant::dequantize_rows;
use super::solve::{solve_anchored, solve_mean_constrained, SolveMode};
use super::stream::CompressedAnimation;
use crate::error::{Error, Result};
use crate::graph::build_connectivity;
use crate::laplacian::build_laplacian_with;
use crate::mesh::MeshSequence;
use crate::spectral::TrajectoryDictionary;

/// Expands a parsed stream back into a (lossy) representation.
pub fn dequantize(c: &CompressedAnimation) -> Result<Representation> {
    let h = &c.header;
    let axes: Vec<AxisRepresentation> = c
        .axes
        .iter()
        .map(|axis| -> Result<AxisRepresentation> {
            let dictionaries = match &axis.dictionary {
                Some(p) => decode_dictionaries(p)?
                    .into_iter()
                    .map(|u| TrajectoryDictionary::new(u, None))
                    .collect(),
                None => Vec::new(),
            };
            let coefficients = axis
                .coefficients
                .iter()
                .map(|q| dequantize_rows(q, h.k_l))
                .collect::<Result<Vec<_>>>()?;
            let means = axis
                .means
                .as_ref()
                .map(|m| m.iter().map(|&v| v as f64).collect());
            Ok(AxisRepresentation {
                dictionaries,
                coefficients,
                means,
            })
        })
        .collect::<Result<_>>()?;

    let anchors = c.anchors.as_ref().map(|a| AnchorSet {
        indices: a.indices.iter().map(|&i| i as usize).collect(),
        values: a.dequantize(h.k),
    });
    let rows = c.axes[0]
        .coefficients
        .first()
        .map(|q| q.rows.iter().map(|r| r.quantizer.bits).collect())
        .unwrap_or_default();

    Ok(Representation {
        variant: h.variant,
        laplacian: h.laplacian,
        n: h.n,
        k: h.k,
        n_b: h.n_b,
        pad: h.pad,
        k_l: h.k_l,
        bits: BitBudget {
            rows,
            anchor: h.anchor_bits,
            dict: h.dict_bits,
            diff: h.diff_bits,
        },
        faces: c.faces.clone(),
        axes: axes.try_into().unwrap(),
        anchors,
    })
}

/// Temporal-domain signal for one axis, `k × row_len` with padding removed.
fn synthesize(repr: &Representation, axis: &AxisRepresentation) -> Result<DMatrix<f64>> {
    if axis.dictionaries.len() != repr.n_b || axis.coefficients.len() != repr.n_b {
        return Err(Error::CorruptPayload(format!(
            "expected {} blocks, found {} dictionaries and {} coefficient sets",
            repr.n_b,
            axis.dictionaries.len(),
            axis.coefficients.len()
        )));
    }
    let k_f = repr.k_f();
    let cols = axis.coefficients.first().map_or(0, |c| c.ncols());
    let mut out = DMatrix::zeros(repr.k + repr.pad, cols);
    for (b, (u, c)) in axis.dictionaries.iter().zip(&axis.coefficients).enumerate() {
        if u.dim() != k_f || c.nrows() != repr.k_l || c.ncols() != cols {
            return Err(Error::CorruptPayload(format!("block {b} has inconsistent shapes")));
        }
        let part = u.leading(repr.k_l) * c;
        out.rows_mut(b * k_f, k_f).copy_from(&part);
    }
    Ok(out.rows(0, repr.k).into_owned())
}

/// Rebuilds vertex positions from a representation.
pub fn reconstruct(repr: &Representation) -> Result<MeshSequence> {
    let (n, k) = (repr.n, repr.k);
    let conn = build_connectivity(&repr.faces, n)?;
    let l = build_laplacian_with(&conn, repr.laplacian);
    let spatial = if repr.variant == Variant::PerMeshGft {
        Some(laplacian_eigenbasis(&conn)?)
    } else {
        None
    };
    let mode = if repr.variant == Variant::PcaQs {
        SolveMode::Serial
    } else {
        SolveMode::Parallel
    };

    let positions: Vec<DMatrix<f64>> = (0..3)
        .into_par_iter()
        .map(|ax| -> Result<DMatrix<f64>> {
            let axis = &repr.axes[ax];
            // n × k
            let delta = if let Some(phi) = &spatial {
                let c = axis
                    .coefficients
                    .first()
                    .filter(|c| c.shape() == (repr.k_l, k))
                    .ok_or_else(|| Error::CorruptPayload("per-mesh coefficients have the wrong shape".into()))?;
                phi.columns(0, repr.k_l) * c
            } else {
                let signal = synthesize(repr, axis)?;
                if repr.variant == Variant::V2v {
                    return Ok(signal.transpose());
                }
                signal.transpose()
            };
            if let Some(anchors) = &repr.anchors {
                solve_anchored(&l, &delta, &anchors.indices, &anchors.values[ax], mode)
            } else if let Some(means) = &axis.means {
                solve_mean_constrained(&l, &delta, means)
            } else {
                Err(Error::CorruptPayload(
                    "representation has neither anchors nor means".into(),
                ))
            }
        })
        .collect::<Result<_>>()?;

    // positions[ax] is n × k; MeshSequence wants k × n per axis.
    let [x, y, z]: [DMatrix<f64>; 3] = positions.try_into().unwrap();
    MeshSequence::from_axis_matrices(
        repr.faces.clone(),
        [&x.transpose(), &y.transpose(), &z.transpose()],
    )
}

pub fn decode(c: &CompressedAnimation) -> Result<MeshSequence> {
    reconstruct(&dequantize(c)?)
}
