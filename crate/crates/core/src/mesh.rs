//! Dynamic mesh data model: one shared triangle list and `k` frames of `n` positions.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{dim_mismatch, Error, Result};
use crate::graph::{build_connectivity, Connectivity, Face};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

pub type Frame = Vec<[f64; 3]>;

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSequence {
    n: usize,
    faces: Vec<Face>,
    frames: Vec<Frame>,
}

impl MeshSequence {
    /// Checks structural invariants (face indices in range, equal frame sizes).
    /// Graph connectivity and finiteness are reported by [`validate_sequence`].
    pub fn new(n: usize, faces: Vec<Face>, frames: Vec<Frame>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidSequence("sequence has no frames".into()));
        }
        for (fi, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i as usize >= n) {
                return Err(Error::IndexOutOfRange {
                    face: fi,
                    index: index as usize,
                    n,
                });
            }
        }
        for (f, frame) in frames.iter().enumerate() {
            if frame.len() != n {
                return Err(Error::VertexCountMismatch {
                    frame: f,
                    found: frame.len(),
                    expected: n,
                });
            }
        }
        Ok(Self { n, faces, frames })
    }

    /// Reassembles a sequence from three `k × n` axis matrices.
    pub fn from_axis_matrices(faces: Vec<Face>, axes: [&DMatrix<f64>; 3]) -> Result<Self> {
        let (k, n) = axes[0].shape();
        if axes.iter().any(|a| a.shape() != (k, n)) {
            return Err(dim_mismatch("axis matrices differ in shape"));
        }
        let frames = (0..k)
            .map(|f| {
                (0..n)
                    .map(|i| [axes[0][(f, i)], axes[1][(f, i)], axes[2][(f, i)]])
                    .collect()
            })
            .collect();
        Self::new(n, faces, frames)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.frames.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, f: usize) -> &Frame {
        &self.frames[f]
    }

    pub fn connectivity(&self) -> Result<Connectivity> {
        build_connectivity(&self.faces, self.n)
    }

    /// `k × n` matrix whose row `f` holds coordinate `axis` of every vertex at frame `f`.
    pub fn axis_matrix(&self, axis: Axis) -> DMatrix<f64> {
        let a = axis.index();
        DMatrix::from_fn(self.k(), self.n, |f, i| self.frames[f][i][a])
    }

    /// Diagonal of the axis-aligned bounding box over all frames.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in self.frames.iter().flatten() {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (0..3).map(|a| (hi[a] - lo[a]).powi(2)).sum::<f64>().sqrt()
    }
}

/// Free-function form of [`MeshSequence::axis_matrix`].
pub fn sequence_axis_matrix(s: &MeshSequence, axis: Axis) -> DMatrix<f64> {
    s.axis_matrix(axis)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    NoFaces,
    BadFace { face: usize, reason: String },
    GraphNotConnected { components: usize },
    IsolatedVertices(Vec<usize>),
    NonFinite { frame: usize, vertex: usize },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NoFaces => write!(f, "no faces"),
            Issue::BadFace { face, reason } => write!(f, "face {face}: {reason}"),
            Issue::GraphNotConnected { components } => {
                write!(f, "graph not connected ({components} components)")
            }
            Issue::IsolatedVertices(v) => write!(f, "{} isolated vertices", v.len()),
            Issue::NonFinite { frame, vertex } => {
                write!(f, "non-finite coordinate at frame {frame}, vertex {vertex}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            return Ok(());
        }
        let msg = self
            .issues
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::InvalidSequence(msg))
    }
}

pub fn validate_sequence(s: &MeshSequence) -> ValidationReport {
    let mut issues = Vec::new();
    match s.connectivity() {
        Ok(conn) => {
            let isolated = conn.isolated_vertices();
            if !isolated.is_empty() {
                issues.push(Issue::IsolatedVertices(isolated));
            }
            let components = conn.component_count();
            if components != 1 {
                issues.push(Issue::GraphNotConnected { components });
            }
        }
        Err(Error::NoFaces) => issues.push(Issue::NoFaces),
        Err(Error::DegenerateFace { face }) => issues.push(Issue::BadFace {
            face,
            reason: "repeated vertex index".into(),
        }),
        Err(e) => issues.push(Issue::BadFace {
            face: 0,
            reason: e.to_string(),
        }),
    }
    'scan: for (f, frame) in s.frames().iter().enumerate() {
        for (i, p) in frame.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                issues.push(Issue::NonFinite { frame: f, vertex: i });
                break 'scan;
            }
        }
    }
    ValidationReport { issues }
}
