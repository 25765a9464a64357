//! OFF/OBJ frame files, frame-sequence manifests and bitstream files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::codec::CompressedAnimation;
use crate::error::{Error, Result};
use crate::graph::Face;
use crate::mesh::{Frame, MeshSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::InvalidConfig(format!(
                "cannot infer mesh format of {} (expected .off or .obj)",
                path.display()
            ))),
        }
    }
}

/// One parsed frame file.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshFile {
    pub positions: Frame,
    pub faces: Vec<Face>,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: Option<&str>, path: &Path, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| parse_err(path, line, "missing coordinate"))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad number `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite coordinate `{tok}`")));
    }
    Ok(v)
}

/// Parses OFF text. Faces must be triangles; `#` starts a comment.
pub fn parse_off(text: &str, path: &Path) -> Result<MeshFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, first) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    // The counts may share the header line ("OFF 4 2 0").
    let rest = first
        .strip_prefix("OFF")
        .ok_or_else(|| parse_err(path, ln, "missing OFF header"))?
        .trim();
    let (ln, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(path, ln, "missing counts line"))?
    } else {
        (ln, rest)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad count `{t}`"))))
        .collect::<Result<_>>()?;
    let [nv, nf, ..] = counts[..] else {
        return Err(parse_err(path, ln, "counts line needs vertex and face counts"));
    };

    let mut positions = Vec::with_capacity(nv.min(1 << 20));
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(path, ln, "unexpected end of vertices"))?;
        let mut t = l.split_whitespace();
        positions.push([
            parse_f64(t.next(), path, ln)?,
            parse_f64(t.next(), path, ln)?,
            parse_f64(t.next(), path, ln)?,
        ]);
    }
    let mut faces = Vec::with_capacity(nf.min(1 << 20));
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(path, ln, "unexpected end of faces"))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad index `{t}`"))))
            .collect::<Result<_>>()?;
        match idx[..] {
            [3, a, b, c, ..] => {
                if let Some(&bad) = [a, b, c].iter().find(|&&i| i >= nv) {
                    return Err(parse_err(path, ln, format!("vertex index {bad} out of range")));
                }
                faces.push([a as u32, b as u32, c as u32]);
            }
            [count, ..] => {
                return Err(parse_err(path, ln, format!("only triangles are supported (got {count} vertices)")))
            }
            [] => unreachable!(),
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(path, ln, "trailing data after faces"));
    }
    Ok(MeshFile { positions, faces })
}

fn obj_index(tok: &str, nv: usize, path: &Path, line: usize) -> Result<u32> {
    let head = tok.split('/').next().unwrap_or("");
    let i: i64 = head
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad face index `{tok}`")))?;
    if i <= 0 {
        return Err(parse_err(path, line, format!("face index {i} must be positive")));
    }
    // Faces may only refer to vertices declared so far.
    if i as usize > nv {
        return Err(parse_err(path, line, format!("vertex index {i} out of range")));
    }
    Ok((i - 1) as u32)
}

/// Parses OBJ text: `v` and triangular `f` records, everything else ignored.
pub fn parse_obj(text: &str, path: &Path) -> Result<MeshFile> {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => positions.push([
                parse_f64(t.next(), path, ln)?,
                parse_f64(t.next(), path, ln)?,
                parse_f64(t.next(), path, ln)?,
            ]),
            Some("f") => {
                let idx: Vec<u32> = t
                    .map(|tok| obj_index(tok, positions.len(), path, ln))
                    .collect::<Result<_>>()?;
                let [a, b, c] = idx[..] else {
                    return Err(parse_err(
                        path,
                        ln,
                        format!("only triangles are supported (got {} vertices)", idx.len()),
                    ));
                };
                faces.push([a, b, c]);
            }
            _ => {}
        }
    }
    Ok(MeshFile { positions, faces })
}

pub fn read_mesh(path: &Path) -> Result<MeshFile> {
    let format = MeshFormat::from_path(path)?;
    let text = fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text, path),
        MeshFormat::Obj => parse_obj(&text, path),
    }
}

/// Shortest round-trip representation, so text output reloads exactly.
pub fn format_mesh(positions: &[[f64; 3]], faces: &[Face], format: MeshFormat) -> String {
    let mut s = String::new();
    match format {
        MeshFormat::Off => {
            let _ = writeln!(s, "OFF\n{} {} 0", positions.len(), faces.len());
            for p in positions {
                let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
            }
            for f in faces {
                let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
            }
        }
        MeshFormat::Obj => {
            for p in positions {
                let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
            }
            for f in faces {
                let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
            }
        }
    }
    s
}

/// Expands a printf-style frame pattern (`%d`, `%0Nd`, `%%`).
pub fn format_frame(pattern: &str, frame: usize) -> Result<String> {
    let mut out = String::with_capacity(pattern.len() + 8);
    let mut chars = pattern.chars().peekable();
    let mut used = false;
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        if chars.peek() == Some(&'%') {
            chars.next();
            out.push('%');
            continue;
        }
        let mut spec = String::new();
        while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            spec.push(d);
            chars.next();
        }
        if chars.next() != Some('d') || used || (spec.len() > 1 && !spec.starts_with('0')) {
            return Err(Error::InvalidConfig(format!(
                "frame pattern `{pattern}` must contain exactly one %d or %0Nd"
            )));
        }
        used = true;
        let width: usize = spec.parse().unwrap_or(0);
        let _ = write!(out, "{frame:0width$}");
    }
    if !used {
        return Err(Error::InvalidConfig(format!(
            "frame pattern `{pattern}` has no %d placeholder"
        )));
    }
    Ok(out)
}

/// Ordered per-frame files making up a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceManifest {
    pub paths: Vec<PathBuf>,
}

impl SequenceManifest {
    pub fn from_paths(paths: Vec<PathBuf>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::InvalidSequence("manifest lists no frames".into()));
        }
        Ok(Self { paths })
    }

    /// Frames `start, start+1, ...` until the first missing file.
    pub fn from_pattern(pattern: &str, start: usize) -> Result<Self> {
        let mut paths = Vec::new();
        loop {
            let p = PathBuf::from(format_frame(pattern, start + paths.len())?);
            if !p.is_file() {
                break;
            }
            paths.push(p);
        }
        if paths.is_empty() {
            return Err(Error::InvalidSequence(format!(
                "no files match `{pattern}` starting at frame {start}"
            )));
        }
        Ok(Self { paths })
    }

    /// Glob matches in lexicographic order.
    pub fn from_glob(pattern: &str) -> Result<Self> {
        let entries = glob::glob(pattern)
            .map_err(|e| Error::InvalidConfig(format!("bad glob `{pattern}`: {e}")))?;
        let mut paths: Vec<PathBuf> = entries
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Io(e.into()))?;
        paths.retain(|p| p.is_file());
        paths.sort();
        if paths.is_empty() {
            return Err(Error::InvalidSequence(format!("no files match `{pattern}`")));
        }
        Ok(Self { paths })
    }

    /// Text file with one frame path per line (relative to the manifest's
    /// directory); blank lines and `#` comments are skipped.
    pub fn from_list_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let paths = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| base.join(l))
            .collect();
        Self::from_paths(paths)
    }

    /// Interprets a command-line input: a `%d` pattern (starting at 0, or 1
    /// when frame 0 is absent), a glob, a `.txt`/`.lst` manifest, or a single
    /// mesh file.
    pub fn resolve(spec: &str) -> Result<Self> {
        if spec.contains('%') {
            return Self::from_pattern(spec, 0).or_else(|_| Self::from_pattern(spec, 1));
        }
        if spec.contains(['*', '?', '[']) {
            return Self::from_glob(spec);
        }
        let path = Path::new(spec);
        match path.extension().and_then(|e| e.to_str()) {
            Some("txt" | "lst") => Self::from_list_file(path),
            _ => {
                if !path.is_file() {
                    return Err(Error::Io(std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        format!("{spec}: no such file"),
                    )));
                }
                Self::from_paths(vec![path.to_path_buf()])
            }
        }
    }
}

/// Reads every frame (in parallel) and checks that they share one
/// connectivity. Frame numbers in errors are 0-based.
pub fn load_sequence(m: &SequenceManifest) -> Result<MeshSequence> {
    let meshes: Vec<MeshFile> = m
        .paths
        .par_iter()
        .map(|p| read_mesh(p))
        .collect::<Result<_>>()?;
    let first = meshes
        .first()
        .ok_or_else(|| Error::InvalidSequence("manifest lists no frames".into()))?;
    let n = first.positions.len();
    for (f, mesh) in meshes.iter().enumerate().skip(1) {
        if mesh.positions.len() != n {
            return Err(Error::VertexCountMismatch {
                frame: f,
                found: mesh.positions.len(),
                expected: n,
            });
        }
        if mesh.faces != first.faces {
            return Err(Error::ConnectivityMismatch { frame: f });
        }
    }
    let faces = first.faces.clone();
    let frames = meshes.into_iter().map(|m| m.positions).collect();
    MeshSequence::new(n, faces, frames)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// One file per frame; the format follows the pattern's extension. A single
/// frame may be written to a plain path without a placeholder. Either all
/// files are written or none are left behind.
pub fn save_sequence(s: &MeshSequence, pattern: &str) -> Result<Vec<PathBuf>> {
    let format = MeshFormat::from_path(Path::new(pattern))?;
    let paths: Vec<PathBuf> = if s.k() == 1 && !pattern.contains('%') {
        vec![PathBuf::from(pattern)]
    } else {
        (0..s.k())
            .map(|f| format_frame(pattern, f).map(PathBuf::from))
            .collect::<Result<_>>()?
    };
    let mut written: Vec<&PathBuf> = Vec::with_capacity(paths.len());
    for (frame, path) in s.frames().iter().zip(&paths) {
        if let Err(e) = write_atomic(path, format_mesh(frame, s.faces(), format).as_bytes()) {
            for p in written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(paths)
}

pub fn write_stream(path: &Path, c: &CompressedAnimation) -> Result<()> {
    write_atomic(path, &c.to_bytes())
}

pub fn read_stream(path: &Path) -> Result<CompressedAnimation> {
    CompressedAnimation::from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t.off")
    }

    #[test]
    fn off_triangle() {
        let m = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", p()).unwrap();
        assert_eq!(m.positions.len(), 3);
        assert_eq!(m.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn off_counts_on_header_line_and_comments() {
        let m = parse_off("# c\nOFF 3 1 0\n0 0 0 # a\n1 0 0\n\n0 1 0\n3 0 1 2\n", p()).unwrap();
        assert_eq!(m.faces.len(), 1);
    }

    #[test]
    fn off_errors_carry_line_numbers() {
        let err = parse_off("OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n", p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n", p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }));
        let err = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n", p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }));
        assert!(parse_off("PLY\n", p()).is_err());
        assert!(parse_off("OFF\n3 1 0\n0 0 0\n", p()).is_err());
    }

    #[test]
    fn obj_ignores_other_records() {
        let text = "# x\nmtllib a.mtl\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nvt 0 0\nv 0 1 0\ng grp\ns off\nf 1/1/1 2/2/1 3//1\n";
        let m = parse_obj(text, Path::new("a.obj")).unwrap();
        assert_eq!(m.positions.len(), 3);
        assert_eq!(m.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn obj_rejects_negative_and_zero_indices() {
        let base = "v 0 0 0\nv 1 0 0\nv 0 1 0\n";
        for f in ["f -3 -2 -1", "f 0 1 2", "f 1 2 4", "f 1 2 3 1"] {
            let err = parse_obj(&format!("{base}{f}\n"), Path::new("a.obj")).unwrap_err();
            assert!(matches!(err, Error::Parse { line: 4, .. }), "{f}: {err}");
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let positions = vec![[0.1, -2.5e-7, 3.0], [1.0 / 3.0, 1e10, -0.0], [std::f64::consts::PI, 2.0, 1e-300]];
        for format in [MeshFormat::Off, MeshFormat::Obj] {
            let text = format_mesh(&positions, &[[0, 1, 2]], format);
            let m = match format {
                MeshFormat::Off => parse_off(&text, p()).unwrap(),
                MeshFormat::Obj => parse_obj(&text, p()).unwrap(),
            };
            assert_eq!(m.positions, positions);
        }
    }

    #[test]
    fn frame_patterns() {
        assert_eq!(format_frame("frame_%04d.off", 7).unwrap(), "frame_0007.off");
        assert_eq!(format_frame("f%d.obj", 12).unwrap(), "f12.obj");
        assert_eq!(format_frame("100%%_%d.off", 1).unwrap(), "100%_1.off");
        assert!(format_frame("plain.off", 0).is_err());
        assert!(format_frame("%d_%d.off", 0).is_err());
        assert!(format_frame("%s.off", 0).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(MeshFormat::from_path(Path::new("a.OFF")).unwrap(), MeshFormat::Off);
        assert_eq!(MeshFormat::from_path(Path::new("a.obj")).unwrap(), MeshFormat::Obj);
        assert!(MeshFormat::from_path(Path::new("a.ply")).is_err());
    }
}
