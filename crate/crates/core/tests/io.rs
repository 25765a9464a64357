use std::fs;
use std::path::Path;

use dynmesh::error::Error;
use dynmesh::io::{load_sequence, read_stream, save_sequence, write_stream, SequenceManifest};
use dynmesh::synth::{synth_sequence, BaseShape, SynthesisParams};
use dynmesh::{encode, EncoderConfig};

const TRI: &str = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
const TRI_SHIFTED: &str = "OFF\n3 1 0\n2 0 0\n3 0 0\n2 1 0\n3 0 1 2\n";

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn two_off_frames_make_a_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.off", TRI);
    let b = write(dir.path(), "b.off", TRI_SHIFTED);
    let s = load_sequence(&SequenceManifest::from_paths(vec![a, b]).unwrap()).unwrap();
    assert_eq!((s.n(), s.k()), (3, 2));
    assert_eq!(s.frame(1)[0], [2.0, 0.0, 0.0]);
}

#[test]
fn extra_vertex_is_reported_with_its_frame() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.off", TRI);
    let b = write(dir.path(), "b.off", "OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n5 5 5\n3 0 1 2\n");
    let err = load_sequence(&SequenceManifest::from_paths(vec![a, b]).unwrap()).unwrap_err();
    assert!(
        matches!(err, Error::VertexCountMismatch { frame: 1, found: 4, expected: 3 }),
        "{err}"
    );
}

#[test]
fn differing_faces_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.off", TRI);
    let b = write(dir.path(), "b.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 2 1\n");
    let c = write(dir.path(), "c.off", TRI);
    let err = load_sequence(&SequenceManifest::from_paths(vec![a, c, b]).unwrap()).unwrap_err();
    assert!(matches!(err, Error::ConnectivityMismatch { frame: 2 }));
}

#[test]
fn parse_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "bad.obj", "v 0 0 0\nv 1 0\n");
    let err = load_sequence(&SequenceManifest::from_paths(vec![a.clone()]).unwrap()).unwrap_err();
    match err {
        Error::Parse { path, line, .. } => {
            assert_eq!(path, a);
            assert_eq!(line, 2);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn save_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for shape in [BaseShape::Cylinder, BaseShape::SphereGrid] {
        let s = synth_sequence(&SynthesisParams { shape, ..SynthesisParams::with_size(120, 3) }).unwrap();
        for ext in ["off", "obj"] {
            let pattern = dir.path().join(format!("{shape}_%04d.{ext}"));
            let pattern = pattern.to_str().unwrap();
            let paths = save_sequence(&s, pattern).unwrap();
            let names: Vec<String> = paths
                .iter()
                .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
                .collect();
            assert_eq!(
                names,
                ["0000", "0001", "0002"].map(|i| format!("{shape}_{i}.{ext}"))
            );
            let back = load_sequence(&SequenceManifest::resolve(pattern).unwrap()).unwrap();
            assert_eq!(back.faces(), s.faces());
            for (fa, fb) in s.frames().iter().zip(back.frames()) {
                for (p, q) in fa.iter().zip(fb) {
                    for c in 0..3 {
                        assert!((p[c] - q[c]).abs() <= 1e-8 * p[c].abs().max(1.0));
                    }
                }
            }
        }
    }
}

#[test]
fn single_frame_goes_to_a_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = synth_sequence(&SynthesisParams::with_size(40, 1)).unwrap();
    let out = dir.path().join("only.off");
    let paths = save_sequence(&s, out.to_str().unwrap()).unwrap();
    assert_eq!(paths, vec![out.clone()]);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let back = load_sequence(&SequenceManifest::resolve(out.to_str().unwrap()).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn glob_is_lexicographic_and_list_file_overrides() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "f_b.off", TRI_SHIFTED);
    write(dir.path(), "f_a.off", TRI);
    let g = SequenceManifest::resolve(dir.path().join("f_*.off").to_str().unwrap()).unwrap();
    let names: Vec<_> = g.paths.iter().map(|p| p.file_name().unwrap().to_owned()).collect();
    assert_eq!(names, ["f_a.off", "f_b.off"]);

    let list = write(dir.path(), "order.txt", "# reversed\nf_b.off\n\nf_a.off\n");
    let s = load_sequence(&SequenceManifest::resolve(list.to_str().unwrap()).unwrap()).unwrap();
    assert_eq!(s.frame(0)[0], [2.0, 0.0, 0.0]);
}

#[test]
fn pattern_may_start_at_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m1.off", TRI);
    write(dir.path(), "m2.off", TRI_SHIFTED);
    let m = SequenceManifest::resolve(dir.path().join("m%d.off").to_str().unwrap()).unwrap();
    assert_eq!(m.paths.len(), 2);
}

#[test]
fn missing_inputs_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert!(SequenceManifest::resolve(dir.path().join("none_%d.off").to_str().unwrap()).is_err());
    assert!(SequenceManifest::resolve(dir.path().join("none_*.off").to_str().unwrap()).is_err());
    assert!(matches!(
        SequenceManifest::resolve(dir.path().join("none.off").to_str().unwrap()),
        Err(Error::Io(_))
    ));
}

#[test]
fn streams_persist_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let s = synth_sequence(&SynthesisParams::with_size(80, 6)).unwrap();
    let c = encode(&s, &EncoderConfig { k_l: 4, ..EncoderConfig::default() }).unwrap();
    let path = dir.path().join("x.dmc");
    write_stream(&path, &c).unwrap();
    assert_eq!(fs::read(&path).unwrap(), c.to_bytes());
    assert_eq!(read_stream(&path).unwrap(), c);
}

#[test]
fn failed_save_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let s = synth_sequence(&SynthesisParams::with_size(40, 3)).unwrap();
    // Frame 1 cannot be created: a directory occupies its name.
    fs::create_dir(dir.path().join("x_1.off")).unwrap();
    let pattern = dir.path().join("x_%d.off");
    assert!(save_sequence(&s, pattern.to_str().unwrap()).is_err());
    let left: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(left, ["x_1.off"]);
}
