//! Encoder, decoder and the binary container.

pub mod anchors;
pub mod bitio;
pub mod config;
pub mod decoder;
pub mod dictionary;
pub mod encoder;
pub mod quant;
pub mod solve;
pub mod stream;

pub use anchors::{select_anchors, AnchorPayload};
pub use config::{AnchorStrategy, EncoderConfig, RowBits, Variant, PER_MESH_MAX_VERTICES};
pub use decoder::{decode, dequantize, reconstruct};
pub use encoder::{analyze, encode, quantize, AnchorSet, AxisRepresentation, BitBudget, Representation};
pub use quant::{QuantizedCoefficients, UniformQuantizer};
pub use solve::{solve_anchored, solve_mean_constrained, SolveMode};
pub use stream::{CompressedAnimation, Header, SectionBits};
