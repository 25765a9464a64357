use std::time::Instant;

use dynmesh::codec::{AnchorStrategy, EncoderConfig, RowBits, Variant};
use dynmesh::error::{Error, Result};
use dynmesh::io::{load_sequence, read_stream, save_sequence, write_atomic, write_stream, SequenceManifest};
use dynmesh::metrics::{distortion, rate_exact};
use dynmesh::synth::{synth_sequence, BaseShape, SynthesisParams};
use dynmesh::{decode, encode, LaplacianKind, MeshSequence};

use crate::args::{BenchArgs, CodecArgs, Command, DecodeArgs, EncodeArgs, LaplacianArg, MetricsArgs, ShapeArg, SynthArgs};

/// Process exit code for each error kind. Usage errors exit with 2 (clap).
pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        "IndexOutOfRange" => 10,
        "DegenerateFace" => 11,
        "NoFaces" => 12,
        "DimensionMismatch" => 13,
        "ConvergenceFailure" => 14,
        "RankDeficiency" => 15,
        "InvalidBits" => 16,
        "InvalidCount" => 17,
        "InvalidConfig" => 18,
        "BlockSizeError" => 19,
        "SignMisalignment" => 20,
        "InvalidSequence" => 21,
        "SingularSystem" => 22,
        "CorruptPayload" => 23,
        "CorruptStream" => 24,
        "VersionMismatch" => 25,
        "ParseError" => 26,
        "ConnectivityMismatch" => 27,
        "VertexCountMismatch" => 28,
        "IoError" => 29,
        _ => 1,
    }
}

/// `error kind=<Kind> code=<n> message=<text>` on one line.
pub fn error_line(e: &Error) -> String {
    let msg = e.to_string().replace(['\n', '\r'], " ");
    format!("error kind={} code={} message={msg}", e.kind(), exit_code(e))
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn parse_bits(s: &str) -> Result<RowBits> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u8>()
                .map_err(|_| Error::InvalidConfig(format!("bad bit depth `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match values[..] {
        [b] => RowBits::Uniform(b),
        _ => RowBits::PerRow(values),
    })
}

fn config(a: &CodecArgs) -> Result<EncoderConfig> {
    let variant = match &a.variant {
        Some(v) => v.parse()?,
        None if a.blocks > 1 => Variant::Blocks,
        None => Variant::PcaQp,
    };
    Ok(EncoderConfig {
        variant,
        k_l: a.kl,
        row_bits: parse_bits(&a.bits)?,
        n_b: a.blocks,
        t_max: a.tmax,
        oi_tol: None,
        anchor_fraction: a.anchors,
        anchor_bits: a.anchor_bits,
        dict_bits: a.dict_bits,
        diff_bits: a.diff_bits,
        anchor_strategy: a.anchor_strategy.parse::<AnchorStrategy>()?,
        seed: a.seed,
        laplacian: match a.laplacian {
            LaplacianArg::Combinatorial => LaplacianKind::Combinatorial,
            LaplacianArg::Normalized => LaplacianKind::Normalized,
        },
        align_subspaces: !a.no_align,
    })
}

fn load(spec: &str) -> Result<MeshSequence> {
    load_sequence(&SequenceManifest::resolve(spec)?)
}

fn cmd_encode(a: EncodeArgs) -> Result<()> {
    let cfg = config(&a.codec)?;
    let s = load(&a.input)?;
    let c = encode(&s, &cfg)?;
    write_stream(&a.output, &c)?;
    let r = rate_exact(&c);
    println!(
        "encoded n={} k={} variant={} bytes={} q={:.4} q_a={:.4} q_d={:.4} aux={:.4} q_s={:.4}",
        s.n(),
        s.k(),
        cfg.variant,
        c.to_bytes().len(),
        r.q,
        r.q_a,
        r.q_d,
        r.auxiliary,
        r.q_s
    );
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> Result<()> {
    let c = read_stream(&a.input)?;
    let s = decode(&c)?;
    let paths = save_sequence(&s, &a.output)?;
    println!("decoded n={} k={} files={}", s.n(), s.k(), paths.len());
    Ok(())
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let orig = load(&a.orig)?;
    let recon = load(&a.recon)?;
    let d = distortion(&orig, &recon)?;
    if let Some(p) = &a.csv {
        write_atomic(p, &csv_bytes(|b| d.write_frame_csv(b))?)?;
    }
    if let Some(p) = &a.vertex_csv {
        write_atomic(p, &csv_bytes(|b| d.write_vertex_csv(b))?)?;
    }
    let max_rms = d.frame_rms.iter().cloned().fold(0.0, f64::max);
    println!(
        "frames={} mean_rms={:e} max_rms={:e} mean_nmsve={:e} bbox_diagonal={:e}",
        orig.k(),
        d.mean_rms,
        max_rms,
        d.mean_nmsve,
        orig.bbox_diagonal()
    );
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let p = SynthesisParams {
        shape: match a.shape {
            ShapeArg::Cylinder => BaseShape::Cylinder,
            ShapeArg::SphereGrid => BaseShape::SphereGrid,
        },
        seed: a.seed,
        ..SynthesisParams::with_size(a.n, a.k)
    };
    let s = synth_sequence(&p)?;
    let paths = save_sequence(&s, &a.out)?;
    println!("synthesized n={} k={} files={}", s.n(), s.k(), paths.len());
    Ok(())
}

const SWEEP_KEYS: [&str; 6] = ["kl", "bits", "blocks", "variant", "tmax", "anchors"];

fn parse_sweep(spec: &str) -> Result<(String, Vec<String>)> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidConfig(format!("sweep `{spec}` is not key=v1,v2,...")))?;
    if !SWEEP_KEYS.contains(&key) {
        return Err(Error::InvalidConfig(format!(
            "unknown sweep key `{key}` (expected one of {})",
            SWEEP_KEYS.join(", ")
        )));
    }
    // Per-row bit lists contain commas, so `bits` values are separated by ';'.
    let sep = if key == "bits" && values.contains(';') { ';' } else { ',' };
    let values: Vec<String> = values.split(sep).map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(Error::InvalidConfig(format!("sweep `{spec}` has no values")));
    }
    Ok((key.to_string(), values))
}

fn apply(base: &CodecArgs, point: &[(String, String)]) -> Result<CodecArgs> {
    let mut a = base.clone();
    let bad = |k: &str, v: &str| Error::InvalidConfig(format!("bad value `{v}` for sweep key `{k}`"));
    for (k, v) in point {
        match k.as_str() {
            "kl" => a.kl = v.parse().map_err(|_| bad(k, v))?,
            "bits" => a.bits = v.clone(),
            "blocks" => a.blocks = v.parse().map_err(|_| bad(k, v))?,
            "variant" => a.variant = Some(v.clone()),
            "tmax" => a.tmax = v.parse().map_err(|_| bad(k, v))?,
            "anchors" => a.anchors = v.parse().map_err(|_| bad(k, v))?,
            _ => unreachable!(),
        }
    }
    Ok(a)
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let s = load(&a.input)?;
    let sweeps = a.sweep.iter().map(|sp| parse_sweep(sp)).collect::<Result<Vec<_>>>()?;
    let mut points: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in &sweeps {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut p = p.clone();
                    p.push((key.clone(), v.clone()));
                    p
                })
            })
            .collect();
    }

    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "variant", "k_l", "n_b", "bits", "bytes", "q", "q_a", "q_d", "aux", "q_s", "mean_rms", "max_rms", "mean_nmsve",
    ];
    if a.timings {
        header.extend(["encode_ms", "decode_ms"]);
    }
    out.write_record(&header).map_err(Error::from)?;
    for point in &points {
        let cfg = config(&apply(&a.codec, point)?)?;
        let t = Instant::now();
        let c = encode(&s, &cfg)?;
        let enc = t.elapsed();
        let t = Instant::now();
        let r = decode(&c)?;
        let dec = t.elapsed();
        let rate = rate_exact(&c);
        let d = distortion(&s, &r)?;
        let max_rms = d.frame_rms.iter().cloned().fold(0.0, f64::max);
        let mut row = vec![
            cfg.variant.to_string(),
            cfg.k_l.to_string(),
            cfg.n_b.to_string(),
            apply(&a.codec, point)?.bits.replace(',', " "),
            c.to_bytes().len().to_string(),
            format!("{:.6}", rate.q),
            format!("{:.6}", rate.q_a),
            format!("{:.6}", rate.q_d),
            format!("{:.6}", rate.auxiliary),
            format!("{:.6}", rate.q_s),
            format!("{:e}", d.mean_rms),
            format!("{max_rms:e}"),
            format!("{:e}", d.mean_nmsve),
        ];
        if a.timings {
            row.push(format!("{:.3}", enc.as_secs_f64() * 1e3));
            row.push(format!("{:.3}", dec.as_secs_f64() * 1e3));
        }
        out.write_record(&row).map_err(Error::from)?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    match &a.csv {
        Some(p) => write_atomic(p, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

