//! Lossy compression of dynamic triangle meshes.
//!
//! Each coordinate axis of a `k`-frame animation is turned into delta
//! coordinates with the mesh Laplacian, projected onto the eigen-trajectories
//! of the temporal autocorrelation, truncated to the leading rows and
//! uniformly quantized. The decoder reconstructs positions with a sparse
//! least-squares solve pinned by a few anchor vertices.
//!
//! ```
//! use dynmesh::synth::{synth_sequence, SynthesisParams};
//! use dynmesh::{decode, encode, metrics, EncoderConfig};
//!
//! let seq = synth_sequence(&SynthesisParams::with_size(200, 16)).unwrap();
//! let stream = encode(&seq, &EncoderConfig { k_l: 8, ..EncoderConfig::default() }).unwrap();
//! let back = decode(&dynmesh::CompressedAnimation::from_bytes(&stream.to_bytes()).unwrap()).unwrap();
//! assert!(metrics::sequence_rms(&seq, &back).unwrap() < 1e-2 * seq.bbox_diagonal());
//! ```

pub mod codec;
pub mod error;
pub mod graph;
pub mod io;
pub mod laplacian;
pub mod mesh;
pub mod metrics;
pub mod sparse;
pub mod spectral;
pub mod synth;

pub use codec::{decode, encode, CompressedAnimation, EncoderConfig, RowBits, Variant};
pub use error::{Error, Result};
pub use graph::{build_connectivity, Connectivity, Face};
pub use laplacian::{build_laplacian, build_laplacian_with, delta_coordinates, LaplacianKind, LaplacianMatrix};
pub use mesh::{sequence_axis_matrix, validate_sequence, Axis, Frame, MeshSequence, ValidationReport};
pub use metrics::{rate_exact, rate_paper_formula, DistortionReport, RateReport};
pub use spectral::TrajectoryDictionary;
