//! Dictionary coding: the first block's basis directly, later blocks as
//! closed-loop differences against the previously decoded basis.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use super::quant::UniformQuantizer;
use crate::error::{dim_mismatch, Error, Result};
use crate::spectral::TrajectoryDictionary;

#[derive(Debug, Clone, PartialEq)]
pub struct DiffBlock {
    pub quantizer: UniformQuantizer,
    pub codes: Vec<u32>,
}

/// Entries are column-major, one column per eigen-trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryPayload {
    pub m: usize,
    pub dict_bits: u8,
    pub diff_bits: u8,
    pub first: Vec<u32>,
    pub diffs: Vec<DiffBlock>,
}

impl DictionaryPayload {
    pub fn blocks(&self) -> usize {
        1 + self.diffs.len()
    }

    pub fn payload_bits(&self) -> u64 {
        let mm = (self.m * self.m) as u64;
        mm * self.dict_bits as u64 + self.diffs.len() as u64 * mm * self.diff_bits as u64
    }
}

/// Relative headroom over `√2` so that columns nearly orthogonal to their
/// predecessor (weak, rotating eigen-trajectories) are not flagged because of
/// quantization noise alone. A genuine sign flip gives a norm close to 2.
const SIGN_SLACK: f64 = 1e-3;

fn unit_quantizer(bits: u8) -> UniformQuantizer {
    UniformQuantizer::new(-1.0, 1.0, bits)
}

/// Dictionaries must share one dimension and have signs pre-aligned.
///
/// Fails with `SignMisalignment` when a difference column is longer than
/// `√2` (plus a small slack), which for unit columns means a clearly
/// negative inner product.
pub fn encode_dictionaries(
    dicts: &[TrajectoryDictionary],
    dict_bits: u8,
    diff_bits: u8,
) -> Result<DictionaryPayload> {
    let first = dicts
        .first()
        .ok_or_else(|| dim_mismatch("no dictionaries to encode"))?;
    let m = first.dim();
    if dicts.iter().any(|d| d.dim() != m) {
        return Err(dim_mismatch("dictionaries differ in dimension"));
    }
    for b in [dict_bits, diff_bits] {
        if !(1..=16).contains(&b) {
            return Err(Error::InvalidBits(b as u32));
        }
    }

    let q0 = unit_quantizer(dict_bits);
    let codes0: Vec<u32> = first.basis().iter().map(|&v| q0.code(v)).collect();
    let mut decoded = DMatrix::from_iterator(m, m, codes0.iter().map(|&c| q0.value(c)));

    let mut diffs = Vec::with_capacity(dicts.len().saturating_sub(1));
    for (block, dict) in dicts.iter().enumerate().skip(1) {
        let diff = dict.basis() - &decoded;
        for (column, col) in diff.column_iter().enumerate() {
            let norm = col.norm();
            if norm > SQRT_2 * (1.0 + SIGN_SLACK) {
                return Err(Error::SignMisalignment { block, column, norm });
            }
        }
        let quantizer = UniformQuantizer::fit(diff.as_slice(), diff_bits);
        let codes: Vec<u32> = diff.iter().map(|&v| quantizer.code(v)).collect();
        for (d, &c) in decoded.iter_mut().zip(&codes) {
            *d += quantizer.value(c);
        }
        diffs.push(DiffBlock { quantizer, codes });
    }

    Ok(DictionaryPayload {
        m,
        dict_bits,
        diff_bits,
        first: codes0,
        diffs,
    })
}

/// Decoded (approximately orthonormal) basis of every block.
pub fn decode_dictionaries(p: &DictionaryPayload) -> Result<Vec<DMatrix<f64>>> {
    let mm = p.m * p.m;
    if p.first.len() != mm || p.diffs.iter().any(|d| d.codes.len() != mm) {
        return Err(Error::CorruptPayload("dictionary payload size mismatch".into()));
    }
    let q0 = unit_quantizer(p.dict_bits);
    let mut cur = DMatrix::from_iterator(p.m, p.m, p.first.iter().map(|&c| q0.value(c)));
    let mut out = Vec::with_capacity(p.blocks());
    out.push(cur.clone());
    for d in &p.diffs {
        for (v, &c) in cur.iter_mut().zip(&d.codes) {
            *v += d.quantizer.value(c);
        }
        out.push(cur.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::householder_q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthonormal(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        householder_q(&DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0))).0
    }

    fn rotate(u: &DMatrix<f64>, eps: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let m = u.nrows();
        let g = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
        let skew = (&g - g.transpose()) * (0.5 * eps);
        u * householder_q(&(DMatrix::identity(m, m) + skew)).0
    }

    fn dict(u: DMatrix<f64>) -> TrajectoryDictionary {
        TrajectoryDictionary::new(u, None)
    }

    #[test]
    fn single_block_has_no_diffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = encode_dictionaries(&[dict(random_orthonormal(5, &mut rng))], 16, 8).unwrap();
        assert!(p.diffs.is_empty());
        assert_eq!(p.payload_bits(), 25 * 16);
    }

    #[test]
    fn identical_blocks_only_code_the_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_orthonormal(6, &mut rng);
        let p = encode_dictionaries(&[dict(u.clone()), dict(u.clone())], 16, 8).unwrap();
        let decoded = decode_dictionaries(&p).unwrap();
        // The diff carries the first block's quantization residual, which is
        // tiny, so the second block is at least as accurate as the first.
        let q = p.diffs[0].quantizer;
        assert!(q.min.abs() <= 2.0 / 65536.0 && q.max.abs() <= 2.0 / 65536.0);
        let e0 = (&decoded[0] - &u).amax();
        let e1 = (&decoded[1] - &u).amax();
        assert!(e1 <= e0 + 1e-12, "{e1} > {e0}");
        assert!(e1 <= q.half_bin() + 1e-12);
    }

    #[test]
    fn small_rotation_closed_loop_vs_direct_quantization() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u1 = random_orthonormal(8, &mut rng);
        let u2 = rotate(&u1, 1e-2, &mut rng);
        let p = encode_dictionaries(&[dict(u1), dict(u2.clone())], 16, 16).unwrap();
        let decoded = decode_dictionaries(&p).unwrap();
        let err = (&decoded[1] - &u2).abs().max();
        assert!(err <= p.diffs[0].quantizer.half_bin() * (1.0 + 1e-9));

        // direct 16-bit quantization of U[2] over [-1, 1]
        let q = UniformQuantizer::new(-1.0, 1.0, 16);
        let direct = u2.map(|v| q.value(q.code(v)));
        let direct_err = (&direct - &u2).abs().max();
        assert!(err < direct_err, "closed loop {err:e} vs direct {direct_err:e}");
    }

    #[test]
    fn no_drift_over_many_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut u = random_orthonormal(8, &mut rng);
        let mut dicts = vec![dict(u.clone())];
        for _ in 0..11 {
            u = rotate(&u, 3e-2, &mut rng);
            dicts.push(dict(u.clone()));
        }
        let p = encode_dictionaries(&dicts, 16, 8).unwrap();
        let decoded = decode_dictionaries(&p).unwrap();
        for (i, (d, truth)) in decoded.iter().zip(&dicts).enumerate().skip(1) {
            let bound = p.diffs[i - 1].quantizer.half_bin();
            let err = (d - truth.basis()).abs().max();
            assert!(err <= bound * (1.0 + 1e-9), "block {i}: {err:e} > {bound:e}");
        }
    }

    #[test]
    fn flipped_column_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_orthonormal(4, &mut rng);
        let mut flipped = u.clone();
        flipped.column_mut(2).neg_mut();
        let err = encode_dictionaries(&[dict(u), dict(flipped)], 16, 8).unwrap_err();
        assert!(matches!(err, Error::SignMisalignment { block: 1, column: 2, .. }));
    }
}
