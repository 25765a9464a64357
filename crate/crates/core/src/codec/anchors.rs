//! Anchor vertex selection and anchor trajectory quantization.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::AnchorStrategy;
use super::quant::UniformQuantizer;
use crate::error::{Error, Result};

/// Sorted, strictly increasing anchor indices.
///
/// `Stride` takes `⌊j·n/n_c⌋`; `SeededRandom` takes a prefix of a seeded
/// shuffle, so equal seeds give equal sets.
pub fn select_anchors(n: usize, n_c: usize, strategy: AnchorStrategy, seed: u64) -> Result<Vec<usize>> {
    if n_c == 0 || n_c > n {
        return Err(Error::InvalidCount(format!(
            "cannot pick {n_c} anchors from {n} vertices"
        )));
    }
    let mut picked = match strategy {
        AnchorStrategy::Stride => {
            let mut v: Vec<usize> = (0..n_c).map(|j| j * n / n_c).collect();
            v.dedup();
            if v.len() < n_c {
                let mut used = vec![false; n];
                v.iter().for_each(|&i| used[i] = true);
                let missing = n_c - v.len();
                v.extend((0..n).filter(|&i| !used[i]).take(missing));
            }
            v
        }
        AnchorStrategy::SeededRandom => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            all.truncate(n_c);
            all
        }
    };
    picked.sort_unstable();
    Ok(picked)
}

/// Anchor trajectories of all three axes, quantized over one range per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorPayload {
    pub indices: Vec<u32>,
    pub bits: u8,
    pub quantizers: [UniformQuantizer; 3],
    /// Per axis, anchor-major then frame: `codes[a][j * k + f]`.
    pub codes: [Vec<u32>; 3],
}

impl AnchorPayload {
    /// `values[a]` is `n_c × k` (anchor × frame).
    pub fn quantize(indices: &[usize], values: &[DMatrix<f64>; 3], bits: u8) -> Self {
        let quantizers: [UniformQuantizer; 3] =
            std::array::from_fn(|a| UniformQuantizer::fit(values[a].as_slice(), bits));
        let codes = std::array::from_fn(|a| {
            let v = &values[a];
            let mut out = Vec::with_capacity(v.len());
            for j in 0..v.nrows() {
                for f in 0..v.ncols() {
                    out.push(quantizers[a].code(v[(j, f)]));
                }
            }
            out
        });
        Self {
            indices: indices.iter().map(|&i| i as u32).collect(),
            bits,
            quantizers,
            codes,
        }
    }

    pub fn n_c(&self) -> usize {
        self.indices.len()
    }

    pub fn dequantize(&self, k: usize) -> [DMatrix<f64>; 3] {
        let n_c = self.n_c();
        std::array::from_fn(|a| {
            DMatrix::from_fn(n_c, k, |j, f| self.quantizers[a].value(self.codes[a][j * k + f]))
        })
    }

    pub fn payload_bits(&self) -> u64 {
        self.codes.iter().map(|c| c.len() as u64 * self.bits as u64).sum()
    }
}
