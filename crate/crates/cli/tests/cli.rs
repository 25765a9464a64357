use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dynmesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynmesh")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dynmesh(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn smoke_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--n", "300", "--k", "12", "--out", &p(d, "in_%03d.off")]);
    assert!(d.join("in_011.off").is_file());
    let enc = ok(&["encode", "--input", &p(d, "in_%03d.off"), "--output", &p(d, "a.dmc"), "--kl", "8"]);
    assert!(enc.contains("q_s="), "{enc}");
    ok(&["decode", "--input", &p(d, "a.dmc"), "--output", &p(d, "out_%03d.obj")]);
    let m = ok(&[
        "metrics", "--orig", &p(d, "in_*.off"), "--recon", &p(d, "out_%03d.obj"),
        "--csv", &p(d, "m.csv"), "--vertex-csv", &p(d, "v.csv"),
    ]);
    assert!(m.starts_with("frames=12 "), "{m}");
    let csv = fs::read_to_string(d.join("m.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("frame,rms,nmsve"));
    assert_eq!(csv.lines().count(), 13);
    assert!(fs::read_to_string(d.join("v.csv")).unwrap().starts_with("vertex,mean_error"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--n", "150", "--k", "8", "--out", &p(d, "f%d.off")]);
    for out in ["x.dmc", "y.dmc"] {
        ok(&["encode", "--input", &p(d, "f%d.off"), "--output", &p(d, out), "--kl", "4", "--blocks", "2"]);
    }
    assert_eq!(fs::read(d.join("x.dmc")).unwrap(), fs::read(d.join("y.dmc")).unwrap());
    for out in ["b1.csv", "b2.csv"] {
        ok(&["bench", "--input", &p(d, "f%d.off"), "--sweep", "kl=1,4", "--csv", &p(d, out)]);
    }
    assert_eq!(fs::read(d.join("b1.csv")).unwrap(), fs::read(d.join("b2.csv")).unwrap());
}

#[test]
fn zero_rows_keep_only_frame_means() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--n", "120", "--k", "5", "--out", &p(d, "s%d.off")]);
    ok(&["encode", "--input", &p(d, "s%d.off"), "--output", &p(d, "z.dmc"), "--kl", "0", "--variant", "pca_q"]);
    ok(&["decode", "--input", &p(d, "z.dmc"), "--output", &p(d, "r%d.off")]);
    for f in 0..5 {
        let text = fs::read_to_string(d.join(format!("r{f}.off"))).unwrap();
        let verts: Vec<Vec<f64>> = text
            .lines()
            .skip(2)
            .take_while(|l| !l.starts_with("3 "))
            .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
            .collect();
        for c in 0..3 {
            let spread = verts.iter().map(|v| v[c]).fold(f64::NEG_INFINITY, f64::max)
                - verts.iter().map(|v| v[c]).fold(f64::INFINITY, f64::min);
            assert!(spread < 1e-5, "frame {f} axis {c} spread {spread}");
        }
    }
}

#[test]
fn bench_sweep_rms_does_not_increase() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--n", "300", "--k", "32", "--out", &p(d, "b%02d.off")]);
    ok(&["bench", "--input", &p(d, "b%02d.off"), "--sweep", "kl=1,2,5,10,20", "--csv", &p(d, "sweep.csv")]);
    let mut rdr = csv::Reader::from_path(d.join("sweep.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "variant");
    let col = headers.iter().position(|h| h == "mean_rms").unwrap();
    let kl = headers.iter().position(|h| h == "k_l").unwrap();
    let rows: Vec<(usize, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[kl].parse().unwrap(), r[col].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), [1, 2, 5, 10, 20]);
    for w in rows.windows(2) {
        // Ties are allowed: once truncation error drops below the
        // quantization floor, extra rows move the error only by round-off
        // of that floor (well under 1e-5 relative).
        assert!(w[1].1 <= w[0].1 * (1.0 + 1e-5), "{rows:?}");
    }
}

#[test]
fn bench_sweeps_cartesian_products_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--n", "100", "--k", "8", "--out", &p(d, "c%d.off")]);
    let out = ok(&[
        "bench", "--input", &p(d, "c%d.off"), "--sweep", "variant=pca_q,pca_qp", "--sweep", "kl=2,4", "--timings",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].ends_with("encode_ms,decode_ms"));
    assert!(lines[1].starts_with("pca_q,2,"));
    assert!(lines[4].starts_with("pca_qp,4,"));
}

fn error_of(out: &Output) -> (i32, String) {
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    (out.status.code().unwrap(), err)
}

#[test]
fn errors_are_single_line_with_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    fs::write(d.join("junk.dmc"), b"not a stream").unwrap();
    let (code, err) = error_of(&dynmesh(&["decode", "--input", &p(d, "junk.dmc"), "--output", &p(d, "o%d.off")]));
    assert!(err.starts_with("error kind=CorruptStream code=24 "), "{err}");
    assert_eq!(code, 24);

    fs::write(d.join("bad.off"), "OFF\n3 1 0\n0 0 0\n1 0\n0 1 0\n3 0 1 2\n").unwrap();
    let (code, err) = error_of(&dynmesh(&["encode", "--input", &p(d, "bad.off"), "--output", &p(d, "o.dmc")]));
    assert_eq!(code, 26, "{err}");
    assert!(err.contains("kind=ParseError") && err.contains(":4:"), "{err}");
    assert!(!d.join("o.dmc").exists());

    ok(&["synth", "--n", "60", "--k", "6", "--out", &p(d, "g%d.off")]);
    let (code, _) = error_of(&dynmesh(&[
        "encode", "--input", &p(d, "g%d.off"), "--output", &p(d, "o.dmc"), "--blocks", "5", "--kl", "1",
    ]));
    assert_eq!(code, 19);
    let (code, _) = error_of(&dynmesh(&["encode", "--input", &p(d, "g%d.off"), "--output", &p(d, "o.dmc"), "--kl", "3", "--bits", "20"]));
    assert_eq!(code, 16);
    let (code, _) = error_of(&dynmesh(&["encode", "--input", &p(d, "g%d.off"), "--output", &p(d, "o.dmc"), "--variant", "zip"]));
    assert_eq!(code, 18);
    let (code, _) = error_of(&dynmesh(&["metrics", "--orig", &p(d, "g%d.off"), "--recon", &p(d, "missing%d.off")]));
    assert_eq!(code, 21);
    assert!(!d.join("o.dmc").exists());

    // Truncated stream.
    ok(&["encode", "--input", &p(d, "g%d.off"), "--output", &p(d, "t.dmc"), "--kl", "3"]);
    let bytes = fs::read(d.join("t.dmc")).unwrap();
    fs::write(d.join("t.dmc"), &bytes[..bytes.len() / 2]).unwrap();
    let (code, _) = error_of(&dynmesh(&["decode", "--input", &p(d, "t.dmc"), "--output", &p(d, "t%d.off")]));
    assert_eq!(code, 24);
    assert!(!d.join("t0.off").exists());
}

#[test]
fn usage_errors_exit_two() {
    let out = dynmesh(&["encode", "--output", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}
