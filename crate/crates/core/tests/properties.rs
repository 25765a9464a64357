use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use dynmesh::codec::{analyze, encode, reconstruct, solve_anchored, EncoderConfig, SolveMode, Variant};
use dynmesh::metrics::{frame_rms, nmsve, nmsve_laplacian, rate_exact};
use dynmesh::spectral::{
    autocorrelation, full_eigenbasis, gft_project, gft_unproject, householder_q, orthogonal_iterations,
    subspace_angle, TrajectoryDictionary,
};
use dynmesh::synth::{synth_sequence, BaseShape, DeformationMode, ModeKind, SynthesisParams};
use dynmesh::{build_laplacian, CompressedAnimation, MeshSequence};

fn shape() -> impl Strategy<Value = BaseShape> {
    prop_oneof![Just(BaseShape::Cylinder), Just(BaseShape::SphereGrid)]
}

fn params(n: std::ops::Range<usize>, k: std::ops::Range<usize>) -> impl Strategy<Value = SynthesisParams> {
    (shape(), n, k, 0.0..0.5f64, 0.0..0.8f64, 0.0..0.2f64, any::<u64>()).prop_map(
        |(shape, n_target, k, bend, twist, breathe, seed)| SynthesisParams {
            shape,
            n_target,
            k,
            modes: vec![
                DeformationMode::new(ModeKind::BendX, bend, 0.7),
                DeformationMode::new(ModeKind::Twist, twist, 0.4),
                DeformationMode::new(ModeKind::Breathe, breathe, 1.3),
            ],
            seed,
        },
    )
}

fn frobenius(a: &MeshSequence, b: &MeshSequence) -> f64 {
    frame_rms(a, b).unwrap().iter().map(|r| r * r).sum::<f64>().sqrt()
}

fn translated(s: &MeshSequence, t: [f64; 3]) -> MeshSequence {
    let frames = s
        .frames()
        .iter()
        .map(|f| f.iter().map(|p| [p[0] + t[0], p[1] + t[1], p[2] + t[2]]).collect())
        .collect();
    MeshSequence::new(s.n(), s.faces().to_vec(), frames).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn gft_is_an_isometry(m in 2usize..24, cols in 1usize..6, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q = householder_q(&DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0))).0;
        let u = TrajectoryDictionary::new(q, None);
        let x = DMatrix::from_fn(m, cols, |_, _| rng.random_range(-10.0..10.0));
        let c = gft_project(&u, &x).unwrap();
        prop_assert!((c.norm() - x.norm()).abs() <= 1e-10 * x.norm());
        let back = gft_unproject(&u, &c).unwrap();
        prop_assert!((back - &x).norm() <= 1e-10 * x.norm());
    }

    #[test]
    fn oi_angle_shrinks_with_iterations(seed in any::<u64>(), m in 4usize..12) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q = householder_q(&DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0))).0;
        let spectrum = DVector::from_fn(m, |i, _| 3f64.powi(-(i as i32)));
        let r = &q * DMatrix::from_diagonal(&spectrum) * q.transpose();
        let r = (&r + r.transpose()) * 0.5;
        let exact = full_eigenbasis(&r).unwrap();
        let start = householder_q(&(exact.basis() + DMatrix::from_fn(m, m, |_, _| rng.random_range(-0.2..0.2)))).0;
        let start = TrajectoryDictionary::new(start, None);
        let mut prev = f64::INFINITY;
        for t in 1..8 {
            let u = orthogonal_iterations(&r, &start, t).unwrap();
            prop_assert!(u.orthonormality_error() < 1e-8);
            let angle = subspace_angle(&exact.leading(2), &u.leading(2)).unwrap();
            prop_assert!(angle <= prev + 1e-12, "t={} angle={} prev={}", t, angle, prev);
            prev = angle;
        }
    }

    #[test]
    fn truncation_error_is_nested(p in params(60..160, 10..14)) {
        let s = synth_sequence(&p).unwrap();
        let k = s.k();
        let mut prev = f64::INFINITY;
        for k_l in [1, 2, 5, 10, k] {
            let cfg = EncoderConfig { k_l, anchor_fraction: 0.05, ..EncoderConfig::default() };
            let e = frobenius(&s, &reconstruct(&analyze(&s, &cfg).unwrap()).unwrap());
            prop_assert!(e <= prev * (1.0 + 1e-9) + 1e-12, "k_l={} e={} prev={}", k_l, e, prev);
            prev = e;
        }
        prop_assert!(prev < 1e-9 * s.bbox_diagonal().max(1.0) * (s.k() as f64).sqrt());
    }

    #[test]
    fn serial_and_parallel_solves_agree(n in 12usize..40, k in 1usize..6, seed in any::<u64>(), n_c in 1usize..4) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = synth_sequence(&SynthesisParams { seed, ..SynthesisParams::with_size(n, 1) }).unwrap();
        let l = build_laplacian(&s.connectivity().unwrap());
        let delta = DMatrix::from_fn(s.n(), k, |_, _| rng.random_range(-1.0..1.0));
        let anchors: Vec<usize> = (0..n_c).map(|j| j * s.n() / n_c).collect();
        let values = DMatrix::from_fn(n_c, k, |_, _| rng.random_range(-1.0..1.0));
        let a = solve_anchored(&l, &delta, &anchors, &values, SolveMode::Serial).unwrap();
        let b = solve_anchored(&l, &delta, &anchors, &values, SolveMode::Parallel).unwrap();
        prop_assert!((a - b).amax() < 1e-9);
    }

    #[test]
    fn streams_round_trip_and_account_for_every_bit(
        p in params(30..90, 4..12),
        variant in prop_oneof![
            Just(Variant::Pca), Just(Variant::PcaQ), Just(Variant::V2v),
            Just(Variant::PcaQs), Just(Variant::PcaQp), Just(Variant::Blocks), Just(Variant::PerMeshGft)
        ],
        k_l in 0usize..4,
        bits in 1u8..=16,
        n_b in 1usize..4,
    ) {
        let s = synth_sequence(&p).unwrap();
        let n_b = if variant == Variant::Blocks { n_b.min(s.k()) } else { 1 };
        let cfg = EncoderConfig {
            variant,
            k_l,
            n_b,
            row_bits: dynmesh::RowBits::Uniform(bits),
            anchor_fraction: 0.05,
            ..EncoderConfig::default()
        };
        let c = match encode(&s, &cfg) {
            Ok(c) => c,
            // Some random layouts are legitimately rejected.
            Err(dynmesh::Error::BlockSizeError { .. } | dynmesh::Error::InvalidConfig(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let bytes = c.to_bytes();
        let parsed = CompressedAnimation::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&parsed, &c);
        prop_assert_eq!(parsed.to_bytes(), bytes.clone());
        let rate = rate_exact(&c);
        let expected = 8.0 * bytes.len() as f64 / (s.n() * s.k()) as f64;
        prop_assert!((rate.q_s - expected).abs() < 1e-12);
        prop_assert!((rate.q + rate.q_a + rate.q_d + rate.auxiliary - rate.q_s).abs() < 1e-12);
        let out = dynmesh::decode(&parsed).unwrap();
        prop_assert_eq!(out.faces(), s.faces());
    }

    #[test]
    fn metrics_ignore_common_translation(p in params(30..80, 2..5), t in prop::array::uniform3(-5.0..5.0f64)) {
        let s = synth_sequence(&p).unwrap();
        let mut r = s.clone();
        let frames: Vec<_> = r.frames().iter().map(|f| f.iter().map(|q| [q[0] * 1.01, q[1], q[2] - 0.02]).collect()).collect();
        r = MeshSequence::new(r.n(), r.faces().to_vec(), frames).unwrap();
        let l = nmsve_laplacian(&s).unwrap();
        let (a, b) = (frame_rms(&s, &r).unwrap(), nmsve(&s, &r, &l).unwrap());
        let (st, rt) = (translated(&s, t), translated(&r, t));
        let (a2, b2) = (frame_rms(&st, &rt).unwrap(), nmsve(&st, &rt, &l).unwrap());
        for (x, y) in a.iter().zip(&a2).chain(b.iter().zip(&b2)) {
            prop_assert!(*x >= 0.0);
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn every_emitted_dictionary_is_orthonormal(p in params(40..120, 8..24), n_b in 1usize..5, t_max in 1usize..6) {
        let s = synth_sequence(&p).unwrap();
        let n_b = n_b.min(s.k() / 2).max(1);
        let cfg = EncoderConfig {
            variant: if n_b == 1 { Variant::PcaQp } else { Variant::Blocks },
            n_b, t_max, k_l: 2, ..EncoderConfig::default()
        };
        let repr = match analyze(&s, &cfg) {
            Ok(r) => r,
            Err(dynmesh::Error::BlockSizeError { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for axis in &repr.axes {
            for d in &axis.dictionaries {
                prop_assert!(d.orthonormality_error() < 1e-8);
            }
        }
        let r = autocorrelation(&s.axis_matrix(dynmesh::Axis::X)).unwrap();
        prop_assert!(full_eigenbasis(&r).unwrap().orthonormality_error() < 1e-8);
    }
}
