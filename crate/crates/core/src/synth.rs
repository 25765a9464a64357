//! Procedural test animations: a tessellated cylinder or sphere driven by a
//! sum of smooth sinusoidal bend, twist and breathing modes.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Face;
use crate::mesh::{Frame, MeshSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseShape {
    #[default]
    Cylinder,
    SphereGrid,
}

impl fmt::Display for BaseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseShape::Cylinder => "cylinder",
            BaseShape::SphereGrid => "sphere-grid",
        })
    }
}

impl FromStr for BaseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cylinder" => Ok(BaseShape::Cylinder),
            "sphere-grid" | "sphere_grid" | "sphere" => Ok(BaseShape::SphereGrid),
            _ => Err(Error::InvalidConfig(format!("unknown shape `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Lateral displacement along x, quadratic in height.
    BendX,
    BendY,
    /// Rotation about the vertical axis, linear in height.
    Twist,
    /// Radial scaling.
    Breathe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationMode {
    pub kind: ModeKind,
    pub amplitude: f64,
    /// Cycles over the whole sequence.
    pub frequency: f64,
    pub phase: f64,
}

impl DeformationMode {
    pub fn new(kind: ModeKind, amplitude: f64, frequency: f64) -> Self {
        Self {
            kind,
            amplitude,
            frequency,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisParams {
    pub shape: BaseShape,
    pub n_target: usize,
    pub k: usize,
    pub modes: Vec<DeformationMode>,
    /// Drives a per-mode phase offset.
    pub seed: u64,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        Self {
            shape: BaseShape::Cylinder,
            n_target: 500,
            k: 32,
            modes: vec![
                DeformationMode::new(ModeKind::BendX, 0.3, 1.0),
                DeformationMode::new(ModeKind::BendY, 0.2, 0.5),
                DeformationMode::new(ModeKind::Twist, 0.6, 0.75),
                DeformationMode::new(ModeKind::Breathe, 0.1, 1.5),
            ],
            seed: 0,
        }
    }
}

impl SynthesisParams {
    pub fn with_size(n_target: usize, k: usize) -> Self {
        Self {
            n_target,
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_target < 4 {
            return Err(Error::InvalidConfig(format!(
                "n_target must be at least 4 (got {})",
                self.n_target
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self
            .modes
            .iter()
            .any(|m| !(m.amplitude.is_finite() && m.frequency.is_finite() && m.phase.is_finite()))
        {
            return Err(Error::InvalidConfig("deformation modes must be finite".into()));
        }
        Ok(())
    }
}

/// Rest shape: positions (height in z, spanning [-1, 1]) and faces.
fn base_mesh(shape: BaseShape, n_target: usize) -> (Vec<[f64; 3]>, Vec<Face>) {
    match shape {
        BaseShape::Cylinder => {
            let seg = ((n_target as f64).sqrt().round() as usize).max(3);
            let rings = ((n_target as f64 / seg as f64).round() as usize).max(2);
            let mut pos = Vec::with_capacity(rings * seg);
            for r in 0..rings {
                let z = -1.0 + 2.0 * r as f64 / (rings - 1) as f64;
                for s in 0..seg {
                    let a = TAU * s as f64 / seg as f64;
                    pos.push([0.5 * a.cos(), 0.5 * a.sin(), z]);
                }
            }
            let id = |r: usize, s: usize| (r * seg + s % seg) as u32;
            let mut faces = Vec::new();
            for r in 0..rings - 1 {
                for s in 0..seg {
                    faces.push([id(r, s), id(r, s + 1), id(r + 1, s + 1)]);
                    faces.push([id(r, s), id(r + 1, s + 1), id(r + 1, s)]);
                }
            }
            (pos, faces)
        }
        BaseShape::SphereGrid => {
            let body = n_target.saturating_sub(2).max(2);
            let seg = ((2.0 * body as f64).sqrt().round() as usize).max(3);
            let rings = ((body as f64 / seg as f64).round() as usize).max(1);
            let mut pos = vec![[0.0, 0.0, -1.0]];
            for r in 0..rings {
                let polar = PI * (r + 1) as f64 / (rings + 1) as f64;
                let (sp, cp) = polar.sin_cos();
                for s in 0..seg {
                    let a = TAU * s as f64 / seg as f64;
                    pos.push([sp * a.cos(), sp * a.sin(), -cp]);
                }
            }
            let top = pos.len() as u32;
            pos.push([0.0, 0.0, 1.0]);
            let id = |r: usize, s: usize| (1 + r * seg + s % seg) as u32;
            let mut faces = Vec::new();
            for s in 0..seg {
                faces.push([0, id(0, s + 1), id(0, s)]);
                faces.push([top, id(rings - 1, s), id(rings - 1, s + 1)]);
            }
            for r in 0..rings - 1 {
                for s in 0..seg {
                    faces.push([id(r, s), id(r, s + 1), id(r + 1, s + 1)]);
                    faces.push([id(r, s), id(r + 1, s + 1), id(r + 1, s)]);
                }
            }
            (pos, faces)
        }
    }
}

fn deform(p: [f64; 3], modes: &[(DeformationMode, f64)], tau: f64) -> [f64; 3] {
    let [mut x, mut y, z] = p;
    let mut bend = [0.0, 0.0];
    for &(m, phase) in modes {
        let w = m.amplitude * (TAU * m.frequency * tau + phase).sin();
        match m.kind {
            ModeKind::BendX => bend[0] += w * z * z,
            ModeKind::BendY => bend[1] += w * z * z,
            ModeKind::Twist => {
                let (s, c) = (w * z).sin_cos();
                (x, y) = (c * x - s * y, s * x + c * y);
            }
            ModeKind::Breathe => {
                x *= 1.0 + w;
                y *= 1.0 + w;
            }
        }
    }
    [x + bend[0], y + bend[1], z]
}

/// Deterministic for a given parameter set.
pub fn synth_sequence(p: &SynthesisParams) -> Result<MeshSequence> {
    p.validate()?;
    let (rest, faces) = base_mesh(p.shape, p.n_target);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let modes: Vec<(DeformationMode, f64)> = p
        .modes
        .iter()
        .map(|&m| (m, m.phase + rng.random_range(0.0..TAU)))
        .collect();
    let frames: Vec<Frame> = (0..p.k)
        .map(|f| {
            let tau = f as f64 / p.k as f64;
            rest.iter().map(|&v| deform(v, &modes, tau)).collect()
        })
        .collect();
    MeshSequence::new(rest.len(), faces, frames)
}
