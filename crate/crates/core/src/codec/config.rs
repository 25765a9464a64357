use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::laplacian::LaplacianKind;

/// Coding pipeline. All variants share the bitstream container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Eigen-trajectory projection of delta coordinates, retained rows at 16 bits.
    Pca,
    /// As `Pca`, with the configured per-row bit allocation.
    PcaQ,
    /// Eigen-trajectory projection of raw positions; no Laplacian, no anchors.
    V2v,
    /// Anchored reconstruction, one factorization per frame.
    PcaQs,
    /// Anchored reconstruction, one shared factorization for all frames.
    PcaQp,
    /// Frame blocks tracked by orthogonal iterations, anchored parallel solve.
    Blocks,
    /// Per-frame spatial spectral coding in the Laplacian eigenbasis.
    PerMeshGft,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Pca,
        Variant::PcaQ,
        Variant::V2v,
        Variant::PcaQs,
        Variant::PcaQp,
        Variant::Blocks,
        Variant::PerMeshGft,
    ];

    pub fn code(self) -> u8 {
        match self {
            Variant::Pca => 0,
            Variant::PcaQ => 1,
            Variant::V2v => 2,
            Variant::PcaQs => 3,
            Variant::PcaQp => 4,
            Variant::Blocks => 5,
            Variant::PerMeshGft => 6,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Pca => "pca",
            Variant::PcaQ => "pca_q",
            Variant::V2v => "v2v",
            Variant::PcaQs => "pca_qs",
            Variant::PcaQp => "pca_qp",
            Variant::Blocks => "blocks",
            Variant::PerMeshGft => "per_mesh_gft",
        }
    }

    pub fn uses_anchors(self) -> bool {
        matches!(self, Variant::PcaQs | Variant::PcaQp | Variant::Blocks)
    }

    /// Variants whose decoder pins the Laplacian nullspace with per-frame means.
    pub fn uses_means(self) -> bool {
        matches!(self, Variant::Pca | Variant::PcaQ | Variant::PerMeshGft)
    }

    pub fn uses_dictionary(self) -> bool {
        self != Variant::PerMeshGft
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace(['-', '+'], "_");
        Self::ALL
            .into_iter()
            .find(|v| v.name() == norm || (norm == "per_mesh" && *v == Variant::PerMeshGft))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorStrategy {
    #[default]
    Stride,
    SeededRandom,
}

impl FromStr for AnchorStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stride" => Ok(Self::Stride),
            "random" | "seeded_random" => Ok(Self::SeededRandom),
            _ => Err(Error::InvalidConfig(format!("unknown anchor strategy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowBits {
    Uniform(u8),
    PerRow(Vec<u8>),
}

impl RowBits {
    pub fn resolve(&self, k_l: usize) -> Result<Vec<u8>> {
        let bits = match self {
            RowBits::Uniform(b) => vec![*b; k_l],
            RowBits::PerRow(v) => {
                if v.len() != k_l {
                    return Err(Error::InvalidConfig(format!(
                        "row_bits has {} entries, k_l is {k_l}",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        if let Some(&b) = bits.iter().find(|&&b| !(1..=16).contains(&b)) {
            return Err(Error::InvalidBits(b as u32));
        }
        Ok(bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderConfig {
    pub variant: Variant,
    /// Retained coefficient rows per block.
    pub k_l: usize,
    pub row_bits: RowBits,
    pub n_b: usize,
    pub t_max: usize,
    /// Optional early stop for orthogonal iterations (radians of column motion).
    pub oi_tol: Option<f64>,
    pub anchor_fraction: f64,
    pub anchor_bits: u8,
    pub dict_bits: u8,
    pub diff_bits: u8,
    pub anchor_strategy: AnchorStrategy,
    pub seed: u64,
    pub laplacian: LaplacianKind,
    /// In block mode, rotate each dictionary inside its retained and
    /// discarded subspaces to match the previous block, so the coded
    /// differences stay small. Sign alignment alone is used when false.
    pub align_subspaces: bool,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            variant: Variant::PcaQp,
            k_l: 20,
            row_bits: RowBits::Uniform(12),
            n_b: 1,
            t_max: 4,
            oi_tol: None,
            anchor_fraction: 0.01,
            anchor_bits: 16,
            dict_bits: 16,
            diff_bits: 8,
            anchor_strategy: AnchorStrategy::Stride,
            seed: 0,
            laplacian: LaplacianKind::Combinatorial,
            align_subspaces: true,
        }
    }
}

/// Largest vertex count accepted by the per-mesh spectral baseline, whose
/// dense `n × n` eigensolve is cubic in `n`.
pub const PER_MESH_MAX_VERTICES: usize = 5000;

impl EncoderConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    /// Anchor count for `n` vertices (zero for anchor-free variants).
    pub fn anchor_count(&self, n: usize) -> usize {
        if !self.variant.uses_anchors() {
            return 0;
        }
        ((self.anchor_fraction * n as f64).round() as usize).clamp(1, n)
    }

    /// `(k_f, pad)` for `k` frames.
    pub fn block_layout(&self, k: usize) -> Result<(usize, usize)> {
        let n_b = self.n_b;
        if n_b == 0 || n_b > k || n_b > u16::MAX as usize {
            return Err(Error::BlockSizeError { k, n_b });
        }
        let k_f = k.div_ceil(n_b);
        let pad = n_b * k_f - k;
        if pad >= k_f {
            // a whole block would be padding
            return Err(Error::BlockSizeError { k, n_b });
        }
        Ok((k_f, pad))
    }

    /// Checks the configuration against a sequence of `n` vertices and `k` frames.
    pub fn validate(&self, n: usize, k: usize) -> Result<()> {
        if self.n_b != 1 && self.variant != Variant::Blocks {
            return Err(Error::InvalidConfig(format!(
                "n_b = {} requires the blocks variant",
                self.n_b
            )));
        }
        let (k_f, _) = self.block_layout(k)?;
        let m = if self.variant == Variant::PerMeshGft { n } else { k_f };
        if self.k_l > m {
            return Err(Error::InvalidConfig(format!(
                "k_l = {} exceeds the {m} available coefficient rows",
                self.k_l
            )));
        }
        if self.variant == Variant::PerMeshGft && n > PER_MESH_MAX_VERTICES {
            return Err(Error::InvalidConfig(format!(
                "per_mesh_gft is limited to {PER_MESH_MAX_VERTICES} vertices (got {n})"
            )));
        }
        self.row_bits.resolve(self.k_l)?;
        for b in [self.anchor_bits, self.dict_bits, self.diff_bits] {
            if !(1..=16).contains(&b) {
                return Err(Error::InvalidBits(b as u32));
            }
        }
        if self.t_max == 0 {
            return Err(Error::InvalidConfig("t_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.anchor_fraction) {
            return Err(Error::InvalidConfig(format!(
                "anchor_fraction {} outside [0, 1]",
                self.anchor_fraction
            )));
        }
        if self.variant.uses_anchors() && self.anchor_fraction == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "variant {} needs anchors",
                self.variant
            )));
        }
        Ok(())
    }
}
