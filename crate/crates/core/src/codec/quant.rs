//! Uniform scalar quantization with bin-center reconstruction.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest `f32` not above `x`.
pub(crate) fn f32_floor(x: f64) -> f32 {
    let f = x as f32;
    if f as f64 > x {
        f.next_down()
    } else {
        f
    }
}

/// Smallest `f32` not below `x`.
pub(crate) fn f32_ceil(x: f64) -> f32 {
    let f = x as f32;
    if (f as f64) < x {
        f.next_up()
    } else {
        f
    }
}

/// `2^bits` equal bins over `[min, max]`; a degenerate range decodes to `min`.
///
/// The range is stored as `f32`, widened outward so every input stays inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformQuantizer {
    pub min: f32,
    pub max: f32,
    pub bits: u8,
}

impl UniformQuantizer {
    pub fn new(min: f64, max: f64, bits: u8) -> Self {
        debug_assert!(min <= max);
        Self {
            min: f32_floor(min),
            max: f32_ceil(max),
            bits,
        }
    }

    pub fn fit(values: &[f64], bits: u8) -> Self {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if values.is_empty() {
            return Self::new(0.0, 0.0, bits);
        }
        Self::new(lo, hi, bits)
    }

    pub fn is_degenerate(&self) -> bool {
        self.min == self.max
    }

    pub fn levels(&self) -> u32 {
        1u32 << self.bits
    }

    pub fn step(&self) -> f64 {
        (self.max as f64 - self.min as f64) / self.levels() as f64
    }

    /// Worst-case reconstruction error for inputs inside the range.
    pub fn half_bin(&self) -> f64 {
        self.step() / 2.0
    }

    pub fn code(&self, x: f64) -> u32 {
        if self.is_degenerate() || self.bits == 0 {
            return 0;
        }
        let t = (x - self.min as f64) / (self.max as f64 - self.min as f64);
        let q = (t * self.levels() as f64).floor();
        q.clamp(0.0, (self.levels() - 1) as f64) as u32
    }

    pub fn value(&self, code: u32) -> f64 {
        if self.is_degenerate() || self.bits == 0 {
            return self.min as f64;
        }
        self.min as f64 + (code as f64 + 0.5) * self.step()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedRow {
    /// `bits == 0` marks a constant row with no payload.
    pub quantizer: UniformQuantizer,
    pub codes: Vec<u32>,
}

/// The leading `k_l` rows of a coefficient matrix; later rows decode as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedCoefficients {
    pub cols: usize,
    pub rows: Vec<QuantizedRow>,
}

impl QuantizedCoefficients {
    pub fn k_l(&self) -> usize {
        self.rows.len()
    }

    pub fn payload_bits(&self) -> u64 {
        self.rows
            .iter()
            .map(|r| r.quantizer.bits as u64 * self.cols as u64)
            .sum()
    }
}

pub fn quantize_rows(c: &DMatrix<f64>, k_l: usize, row_bits: &[u8]) -> Result<QuantizedCoefficients> {
    if k_l > c.nrows() {
        return Err(Error::InvalidConfig(format!(
            "k_l = {k_l} exceeds {} coefficient rows",
            c.nrows()
        )));
    }
    if row_bits.len() != k_l {
        return Err(Error::InvalidConfig(format!(
            "{} row bit depths for k_l = {k_l}",
            row_bits.len()
        )));
    }
    let rows = (0..k_l)
        .map(|i| {
            let bits = row_bits[i];
            if !(1..=16).contains(&bits) {
                return Err(Error::InvalidBits(bits as u32));
            }
            let values: Vec<f64> = c.row(i).iter().copied().collect();
            let mut quantizer = UniformQuantizer::fit(&values, bits);
            if quantizer.is_degenerate() {
                quantizer.bits = 0;
            }
            let codes = values.iter().map(|&v| quantizer.code(v)).collect();
            Ok(QuantizedRow { quantizer, codes })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedCoefficients { cols: c.ncols(), rows })
}

pub fn dequantize_rows(q: &QuantizedCoefficients, m: usize) -> Result<DMatrix<f64>> {
    if m < q.k_l() {
        return Err(Error::InvalidConfig(format!(
            "cannot place {} rows into {m}",
            q.k_l()
        )));
    }
    let mut out = DMatrix::zeros(m, q.cols);
    for (i, row) in q.rows.iter().enumerate() {
        if row.quantizer.bits > 16 {
            return Err(Error::InvalidBits(row.quantizer.bits as u32));
        }
        if row.codes.len() != q.cols && row.quantizer.bits != 0 {
            return Err(Error::CorruptPayload(format!(
                "row {i} has {} codes for {} columns",
                row.codes.len(),
                q.cols
            )));
        }
        if row.quantizer.bits == 0 {
            out.row_mut(i).fill(row.quantizer.min as f64);
            continue;
        }
        for (j, &code) in row.codes.iter().enumerate() {
            if code >= row.quantizer.levels() {
                return Err(Error::CorruptPayload(format!(
                    "row {i} code {code} needs more than {} bits",
                    row.quantizer.bits
                )));
            }
            out[(i, j)] = row.quantizer.value(code);
        }
    }
    Ok(out)
}
