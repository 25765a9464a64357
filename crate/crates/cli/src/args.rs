use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dynmesh", version, about = "Compress dynamic triangle meshes with eigen-trajectory dictionaries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a frame sequence into a single stream file.
    Encode(EncodeArgs),
    /// Reconstruct frame files from a stream.
    Decode(DecodeArgs),
    /// Compare two sequences (per-frame RMS and NMSVE).
    Metrics(MetricsArgs),
    /// Generate a procedural test animation.
    Synth(SynthArgs),
    /// Rate/distortion sweep over encoder settings.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LaplacianArg {
    Combinatorial,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShapeArg {
    Cylinder,
    SphereGrid,
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    /// pca, pca_q, v2v, pca_qs, pca_qp, blocks or per_mesh_gft.
    /// Defaults to blocks when --blocks > 1, pca_qp otherwise.
    #[arg(long)]
    pub variant: Option<String>,
    /// Retained coefficient rows (per block).
    #[arg(long, default_value_t = 20)]
    pub kl: usize,
    /// Coefficient bit depth: one value, or a comma-separated list per row.
    #[arg(long, default_value = "12")]
    pub bits: String,
    /// Number of temporal blocks.
    #[arg(long, default_value_t = 1)]
    pub blocks: usize,
    /// Orthogonal-iteration budget per block.
    #[arg(long, default_value_t = 4)]
    pub tmax: usize,
    /// Fraction of vertices used as anchors.
    #[arg(long, default_value_t = 0.01)]
    pub anchors: f64,
    /// stride or random.
    #[arg(long, default_value = "stride")]
    pub anchor_strategy: String,
    #[arg(long, default_value_t = 16)]
    pub anchor_bits: u8,
    #[arg(long, default_value_t = 16)]
    pub dict_bits: u8,
    #[arg(long, default_value_t = 8)]
    pub diff_bits: u8,
    #[arg(long, value_enum, default_value_t = LaplacianArg::Combinatorial)]
    pub laplacian: LaplacianArg,
    /// Keep plain sign alignment between blocks instead of subspace alignment.
    #[arg(long)]
    pub no_align: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Frame pattern (%d / %0Nd), glob, .txt manifest or single mesh file.
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub codec: CodecArgs,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output frame pattern, e.g. out_%04d.off (a plain path for one frame).
    #[arg(long)]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub orig: String,
    #[arg(long)]
    pub recon: String,
    /// Per-frame CSV (frame, rms, nmsve).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Per-vertex mean error CSV, for heat maps.
    #[arg(long)]
    pub vertex_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = ShapeArg::Cylinder)]
    pub shape: ShapeArg,
    /// Approximate vertex count.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    /// Output frame pattern.
    #[arg(long)]
    pub out: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub input: String,
    /// key=v1,v2,... with key one of kl, bits, blocks, variant, tmax,
    /// anchors. Repeat to sweep the cartesian product.
    #[arg(long)]
    pub sweep: Vec<String>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Add wall-clock columns (makes the output non-deterministic).
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub codec: CodecArgs,
}
