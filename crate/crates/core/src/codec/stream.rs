//! Self-describing container. All multi-byte fields are little-endian and
//! packed payloads are MSB-first, padded to a byte boundary per section.
//!
//! ```text
//! "DMC1" | version u16 | variant u8 | flags u8 | n u32 | k u32 | n_b u16 | pad u16
//! | k_l u32 | n_c u32 | anchor_bits u8 | dict_bits u8 | diff_bits u8 | reserved u8
//! | face count u32 | faces u32×3
//! | per axis (x, y, z):
//! |   dictionary: diff ranges f32×2 per block after the first | packed entries
//! |   row headers (min f32, max f32, bits u8) per block and row | packed coefficients
//! |   per-frame means f32×k (anchor-free variants)
//! | anchors: indices u32×n_c | range f32×2 per axis | packed values
//! ```

use super::anchors::AnchorPayload;
use super::bitio::{packed_bytes, BitReader, BitWriter, ByteReader, ByteWriter};
use super::config::{Variant, PER_MESH_MAX_VERTICES};
use super::dictionary::{DictionaryPayload, DiffBlock};
use super::quant::{QuantizedCoefficients, QuantizedRow, UniformQuantizer};
use crate::error::{Error, Result};
use crate::graph::Face;
use crate::laplacian::LaplacianKind;

pub const MAGIC: &[u8; 4] = b"DMC1";
pub const VERSION: u16 = 1;
pub const HEADER_BYTES: usize = 32;

const FLAG_NORMALIZED_LAPLACIAN: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub variant: Variant,
    pub laplacian: LaplacianKind,
    pub n: usize,
    /// Frames before padding.
    pub k: usize,
    pub n_b: usize,
    pub pad: usize,
    pub k_l: usize,
    pub n_c: usize,
    pub anchor_bits: u8,
    pub dict_bits: u8,
    pub diff_bits: u8,
}

impl Header {
    pub fn k_padded(&self) -> usize {
        self.k + self.pad
    }

    pub fn k_f(&self) -> usize {
        self.k_padded() / self.n_b
    }

    /// Entries per coefficient row.
    pub fn row_len(&self) -> usize {
        match self.variant {
            Variant::PerMeshGft => self.k,
            _ => self.n,
        }
    }

    /// Rows available before truncation.
    pub fn coefficient_rows(&self) -> usize {
        match self.variant {
            Variant::PerMeshGft => self.n,
            _ => self.k_f(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSection {
    pub dictionary: Option<DictionaryPayload>,
    /// One entry per block.
    pub coefficients: Vec<QuantizedCoefficients>,
    pub means: Option<Vec<f32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedAnimation {
    pub header: Header,
    pub faces: Vec<Face>,
    pub axes: [AxisSection; 3],
    pub anchors: Option<AnchorPayload>,
}

/// Bit counts of each stream component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionBits {
    pub coefficients: u64,
    pub anchors: u64,
    pub dictionaries: u64,
    pub total: u64,
}

impl SectionBits {
    /// Header, connectivity, ranges, means, indices and byte padding.
    pub fn auxiliary(&self) -> u64 {
        self.total - self.coefficients - self.anchors - self.dictionaries
    }
}

impl CompressedAnimation {
    /// Payload bit counts, derived from the in-memory representation.
    pub fn section_bits(&self) -> SectionBits {
        let h = &self.header;
        let mut coefficients = 0;
        let mut dictionaries = 0;
        let mut total = (HEADER_BYTES + 4 + 12 * self.faces.len()) as u64 * 8;
        for axis in &self.axes {
            if let Some(d) = &axis.dictionary {
                dictionaries += d.payload_bits();
                total += (8 * d.diffs.len() + packed_bytes(d.payload_bits())) as u64 * 8;
            }
            let coeff: u64 = axis.coefficients.iter().map(|c| c.payload_bits()).sum();
            coefficients += coeff;
            total += (9 * h.k_l * axis.coefficients.len() + packed_bytes(coeff)) as u64 * 8;
            if let Some(m) = &axis.means {
                total += 32 * m.len() as u64;
            }
        }
        let mut anchors = 0;
        if let Some(a) = &self.anchors {
            anchors = a.payload_bits();
            total += (4 * a.n_c() + 24 + packed_bytes(anchors)) as u64 * 8;
        }
        SectionBits {
            coefficients,
            anchors,
            dictionaries,
            total,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut w = ByteWriter::default();
        w.bytes(MAGIC);
        w.u16(VERSION);
        w.u8(h.variant.code());
        w.u8(match h.laplacian {
            LaplacianKind::Combinatorial => 0,
            LaplacianKind::Normalized => FLAG_NORMALIZED_LAPLACIAN,
        });
        w.u32(h.n as u32);
        w.u32(h.k as u32);
        w.u16(h.n_b as u16);
        w.u16(h.pad as u16);
        w.u32(h.k_l as u32);
        w.u32(h.n_c as u32);
        w.u8(h.anchor_bits);
        w.u8(h.dict_bits);
        w.u8(h.diff_bits);
        w.u8(0);

        w.u32(self.faces.len() as u32);
        for face in &self.faces {
            face.iter().for_each(|&i| w.u32(i));
        }

        for axis in &self.axes {
            if let Some(d) = &axis.dictionary {
                for diff in &d.diffs {
                    w.f32(diff.quantizer.min);
                    w.f32(diff.quantizer.max);
                }
                let mut bits = BitWriter::new();
                d.first.iter().for_each(|&c| bits.write(c, d.dict_bits as u32));
                for diff in &d.diffs {
                    diff.codes.iter().for_each(|&c| bits.write(c, d.diff_bits as u32));
                }
                w.bytes(&bits.finish());
            }
            for block in &axis.coefficients {
                for row in &block.rows {
                    w.f32(row.quantizer.min);
                    w.f32(row.quantizer.max);
                    w.u8(row.quantizer.bits);
                }
            }
            let mut bits = BitWriter::new();
            for block in &axis.coefficients {
                for row in &block.rows {
                    let b = row.quantizer.bits as u32;
                    if b > 0 {
                        row.codes.iter().for_each(|&c| bits.write(c, b));
                    }
                }
            }
            w.bytes(&bits.finish());
            if let Some(means) = &axis.means {
                means.iter().for_each(|&m| w.f32(m));
            }
        }

        if let Some(a) = &self.anchors {
            a.indices.iter().for_each(|&i| w.u32(i));
            for q in &a.quantizers {
                w.f32(q.min);
                w.f32(q.max);
            }
            let mut bits = BitWriter::new();
            for codes in &a.codes {
                codes.iter().for_each(|&c| bits.write(c, a.bits as u32));
            }
            w.bytes(&bits.finish());
        }
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(data);
        if r.take(4)? != MAGIC {
            return Err(Error::CorruptStream("bad magic".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: VERSION,
            });
        }
        let variant_code = r.u8()?;
        let variant = Variant::from_code(variant_code)
            .ok_or_else(|| Error::CorruptStream(format!("unknown variant code {variant_code}")))?;
        let flags = r.u8()?;
        if flags & !FLAG_NORMALIZED_LAPLACIAN != 0 {
            return Err(Error::CorruptStream(format!("unknown flags {flags:#x}")));
        }
        let laplacian = if flags & FLAG_NORMALIZED_LAPLACIAN != 0 {
            LaplacianKind::Normalized
        } else {
            LaplacianKind::Combinatorial
        };
        let header = Header {
            variant,
            laplacian,
            n: r.u32()? as usize,
            k: r.u32()? as usize,
            n_b: r.u16()? as usize,
            pad: r.u16()? as usize,
            k_l: r.u32()? as usize,
            n_c: r.u32()? as usize,
            anchor_bits: r.u8()?,
            dict_bits: r.u8()?,
            diff_bits: r.u8()?,
        };
        let _reserved = r.u8()?;
        check_header(&header)?;
        let h = &header;

        let face_count = r.u32()? as usize;
        let face_bytes = r.take(face_count.checked_mul(12).ok_or_else(too_large)?)?;
        let faces: Vec<Face> = face_bytes
            .chunks_exact(12)
            .map(|c| {
                std::array::from_fn(|j| u32::from_le_bytes(c[4 * j..4 * j + 4].try_into().unwrap()))
            })
            .collect();
        if faces.iter().flatten().any(|&i| i as usize >= h.n) {
            return Err(Error::CorruptStream("face index out of range".into()));
        }
        // Valid sequences have no isolated vertices, so the face list bounds n.
        if h.n > 3 * faces.len() {
            return Err(Error::CorruptStream("more vertices than the faces reference".into()));
        }
        // Every axis carries either a k_f x k_f dictionary or k frame means;
        // refuse sizes the remaining bytes cannot possibly hold.
        let min_bits = if variant.uses_dictionary() {
            3 * (h.k_f() as u128).pow(2)
        } else {
            3 * 32 * h.k as u128
        };
        if min_bits > 8 * r.remaining() as u128 {
            return Err(Error::CorruptStream("declared sizes exceed the stream".into()));
        }

        let m = h.k_f();
        let row_len = h.row_len();
        let mut axes = Vec::with_capacity(3);
        for _ in 0..3 {
            let dictionary = if variant.uses_dictionary() {
                let mut ranges = Vec::with_capacity(h.n_b - 1);
                for _ in 1..h.n_b {
                    let (min, max) = (r.f32()?, r.f32()?);
                    if min > max {
                        return Err(Error::CorruptStream("inverted dictionary range".into()));
                    }
                    ranges.push((min, max));
                }
                let mm = m * m;
                let bits = mm as u64 * h.dict_bits as u64
                    + (h.n_b as u64 - 1) * mm as u64 * h.diff_bits as u64;
                let mut br = BitReader::new(r.take(packed_bytes(bits))?);
                let first = (0..mm)
                    .map(|_| br.read(h.dict_bits as u32))
                    .collect::<Result<Vec<_>>>()?;
                let diffs = ranges
                    .into_iter()
                    .map(|(min, max)| {
                        let codes = (0..mm)
                            .map(|_| br.read(h.diff_bits as u32))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(DiffBlock {
                            quantizer: UniformQuantizer { min, max, bits: h.diff_bits },
                            codes,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(DictionaryPayload {
                    m,
                    dict_bits: h.dict_bits,
                    diff_bits: h.diff_bits,
                    first,
                    diffs,
                })
            } else {
                None
            };

            let blocks = h.n_b;
            if (blocks as u128) * (h.k_l as u128) * 9 > r.remaining() as u128 {
                return Err(Error::CorruptStream("coefficient headers exceed the stream".into()));
            }
            let mut quantizers = Vec::with_capacity(blocks * h.k_l);
            for _ in 0..blocks * h.k_l {
                let (min, max, bits) = (r.f32()?, r.f32()?, r.u8()?);
                if bits > 16 || min > max {
                    return Err(Error::CorruptStream("invalid coefficient row header".into()));
                }
                quantizers.push(UniformQuantizer { min, max, bits });
            }
            let payload: u64 = quantizers.iter().map(|q| q.bits as u64 * row_len as u64).sum();
            let mut br = BitReader::new(r.take(packed_bytes(payload))?);
            let mut coefficients = Vec::with_capacity(blocks);
            for chunk in quantizers.chunks(h.k_l.max(1)).take(blocks) {
                let rows = chunk
                    .iter()
                    .map(|&quantizer| {
                        let codes = if quantizer.bits == 0 {
                            vec![0; row_len]
                        } else {
                            (0..row_len)
                                .map(|_| br.read(quantizer.bits as u32))
                                .collect::<Result<Vec<_>>>()?
                        };
                        Ok(QuantizedRow { quantizer, codes })
                    })
                    .collect::<Result<Vec<_>>>()?;
                coefficients.push(QuantizedCoefficients { cols: row_len, rows });
            }
            if h.k_l == 0 {
                coefficients = (0..blocks)
                    .map(|_| QuantizedCoefficients { cols: row_len, rows: Vec::new() })
                    .collect();
            }

            let means = if variant.uses_means() {
                Some((0..h.k).map(|_| r.f32()).collect::<Result<Vec<_>>>()?)
            } else {
                None
            };
            axes.push(AxisSection {
                dictionary,
                coefficients,
                means,
            });
        }

        let anchors = if variant.uses_anchors() {
            let indices = (0..h.n_c).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i as usize >= h.n) {
                return Err(Error::CorruptStream("anchor indices not sorted or out of range".into()));
            }
            let mut quantizers = [UniformQuantizer { min: 0.0, max: 0.0, bits: h.anchor_bits }; 3];
            for q in &mut quantizers {
                q.min = r.f32()?;
                q.max = r.f32()?;
                if q.min > q.max {
                    return Err(Error::CorruptStream("inverted anchor range".into()));
                }
            }
            let per_axis = h.n_c * h.k;
            let bits = 3 * per_axis as u64 * h.anchor_bits as u64;
            let mut br = BitReader::new(r.take(packed_bytes(bits))?);
            let mut read_axis = || {
                (0..per_axis)
                    .map(|_| br.read(h.anchor_bits as u32))
                    .collect::<Result<Vec<_>>>()
            };
            let codes = [read_axis()?, read_axis()?, read_axis()?];
            Some(AnchorPayload {
                indices,
                bits: h.anchor_bits,
                quantizers,
                codes,
            })
        } else {
            None
        };

        if r.remaining() != 0 {
            return Err(Error::CorruptStream(format!("{} trailing bytes", r.remaining())));
        }
        let axes: [AxisSection; 3] = axes.try_into().unwrap();
        Ok(Self {
            header,
            faces,
            axes,
            anchors,
        })
    }
}

fn too_large() -> Error {
    Error::CorruptStream("size field overflows".into())
}

fn check_header(h: &Header) -> Result<()> {
    let bad = |msg: &str| Err(Error::CorruptStream(msg.into()));
    if h.n == 0 || h.k == 0 || h.n_b == 0 {
        return bad("zero dimension in header");
    }
    if h.k_padded() % h.n_b != 0 || (h.pad > 0 && h.pad >= h.k_f()) {
        return bad("inconsistent block layout");
    }
    if h.variant != Variant::Blocks && (h.n_b != 1 || h.pad != 0) {
        return bad("blocks declared for a single-block variant");
    }
    if h.variant == Variant::PerMeshGft && h.n > PER_MESH_MAX_VERTICES {
        return bad("per-mesh stream exceeds the vertex limit");
    }
    if h.k_l > h.coefficient_rows() {
        return bad("k_l exceeds available rows");
    }
    if h.variant.uses_anchors() {
        if h.n_c == 0 || h.n_c > h.n {
            return bad("invalid anchor count");
        }
    } else if h.n_c != 0 {
        return bad("anchors declared for an anchor-free variant");
    }
    for b in [h.anchor_bits, h.dict_bits, h.diff_bits] {
        if !(1..=16).contains(&b) {
            return bad("bit depth outside 1..=16");
        }
    }
    Ok(())
}
