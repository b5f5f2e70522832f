//! End-to-end sweep tests against the deterministic mock codec in
//! testdata/. The mock quantizes pixels with a CRF-dependent step and
//! deflate-compresses them, so rates fall and distortion rises along the
//! ladder exactly like a real encoder, minus the nondeterminism.

use std::path::{Path, PathBuf};

use adasharp_core::y4m::write_y4m_file;
use adasharp_core::{Frame, Sequence};
use adasharp_harness::{
    import_external_scores, rd_sweep, read_curve_csv, run_encode, write_curve_csv, EncoderSpec,
    HarnessError, Metric, SweepOptions,
};
use adasharp_testkit::gen;

fn mock_spec() -> EncoderSpec {
    let script = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata/mock_encoder.py")
        .canonicalize()
        .expect("mock encoder script");
    EncoderSpec::new(
        "mock",
        format!(
            "python3 {} encode {{input}} {{output}} {{crf}} {{preset}}",
            script.display()
        ),
        format!("python3 {} decode {{input}} {{output}}", script.display()),
    )
    .unwrap()
}

/// 8-frame 64x64 4:2:0 noise fixture at 30 fps.
fn fixture(dir: &Path) -> PathBuf {
    let frames = (0..8)
        .map(|i| {
            let bytes = |n: usize, s: u64| -> Vec<u8> {
                gen::noise_plane(n, 1, s).iter().map(|&v| v as u8).collect()
            };
            Frame::yuv420(
                64,
                64,
                bytes(64 * 64, i * 3),
                bytes(32 * 32, i * 3 + 1),
                bytes(32 * 32, i * 3 + 2),
            )
            .unwrap()
        })
        .collect();
    let seq = Sequence::new(frames, 30, 1).unwrap();
    let path = dir.join("input.y4m");
    write_y4m_file(&seq, &path).unwrap();
    path
}

#[test]
fn encode_measures_rate_from_size_and_duration() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let spec = mock_spec();
    let (bitstream, rate) = run_encode(&spec, &input, 27, dir.path()).unwrap();
    assert!(bitstream.ends_with("crf27.bin"));
    let bytes = std::fs::metadata(&bitstream).unwrap().len();
    assert!(bytes > 0);
    // 8 frames at 30 fps.
    let expected = bytes as f64 * 8.0 * 30.0 / (8.0 * 1000.0);
    assert_eq!(rate, expected);
    // The run log captured (empty) stderr.
    assert!(dir.path().join("crf27.encode.log").exists());

    // Re-encoding reproduces the bitstream size bit-for-bit.
    let (_, rate_again) = run_encode(&spec, &input, 27, dir.path()).unwrap();
    assert_eq!(rate, rate_again);
}

#[test]
fn missing_binary_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let spec = EncoderSpec::new(
        "ghost",
        "definitely-not-a-real-encoder {input} {output} {crf} {preset}",
        "definitely-not-a-real-decoder {input} {output}",
    )
    .unwrap();
    let err = run_encode(&spec, &input, 27, dir.path()).unwrap_err();
    match err {
        HarnessError::MissingBinary { command } => {
            assert_eq!(command, "definitely-not-a-real-encoder");
        }
        other => panic!("expected MissingBinary, got {other:?}"),
    }
    assert!(!dir.path().join("crf27.bin").exists());
}

#[test]
fn encoder_failure_surfaces_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    // CRF 99 is outside the mock's [0, 51] range.
    let err = run_encode(&mock_spec(), &input, 99, dir.path()).unwrap_err();
    match err {
        HarnessError::ChildFailed { stderr, .. } => {
            assert!(stderr.contains("crf 99 out of range"), "stderr: {stderr}");
        }
        other => panic!("expected ChildFailed, got {other:?}"),
    }
    assert!(!dir.path().join("crf99.bin").exists());
}

#[test]
fn sweep_runs_the_full_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let workdir = dir.path().join("sweep");
    let opts = SweepOptions {
        metrics: vec![Metric::Psnr, Metric::Charbonnier],
        ..Default::default()
    };
    let sweep = rd_sweep(&mock_spec(), &input, &input, &workdir, &opts).unwrap();

    assert_eq!(
        sweep.rungs.iter().map(|r| r.crf).collect::<Vec<_>>(),
        vec![21, 24, 27, 30, 33]
    );
    for rung in &sweep.rungs {
        assert!(rung.rate_kbps > 0.0);
        assert!(rung.bitstream_path.exists());
        assert!(rung.decoded_path.exists());
        assert!(rung.quality["psnr"].unwrap().is_finite());
        assert!(rung.quality["charbonnier"].unwrap() > 0.0);
    }
    // Coarser quantization must cost quality and save rate.
    let psnr: Vec<f64> = sweep.rungs.iter().map(|r| r.quality["psnr"].unwrap()).collect();
    assert!(psnr.windows(2).all(|w| w[1] < w[0]), "psnr not decreasing: {psnr:?}");
    let rates: Vec<f64> = sweep.rungs.iter().map(|r| r.rate_kbps).collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "rates not decreasing: {rates:?}");
    assert!(sweep.warnings.is_empty(), "{:?}", sweep.warnings);

    // Manifest records the completed sweep.
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(workdir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["partial"], serde_json::Value::Bool(false));
    assert_eq!(manifest["encoder"], "mock");
    assert_eq!(manifest["rungs"].as_array().unwrap().len(), 5);

    // Curves come out sorted by rate and usable downstream.
    let curve = sweep.curve("psnr").unwrap();
    assert_eq!(curve.points().len(), 5);
    let bd = adasharp_core::metrics::bd_rate(&curve, &curve).unwrap();
    assert!(bd.bd_rate_percent.abs() < 1e-12);

    // Curve CSV round trip.
    let csv_path = dir.path().join("psnr.csv");
    write_curve_csv(&csv_path, &sweep, "psnr").unwrap();
    let (metric, rows) = read_curve_csv(&csv_path).unwrap();
    assert_eq!(metric, "psnr");
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].crf, 21);
    assert_eq!(rows[0].rate_kbps, sweep.rungs[0].rate_kbps);
}

#[test]
fn sweep_aborts_on_a_failing_rung_with_partial_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let workdir = dir.path().join("sweep");
    let opts = SweepOptions {
        crf_list: vec![21, 99], // 99 exceeds the mock's range
        ..Default::default()
    };
    let err = rd_sweep(&mock_spec(), &input, &input, &workdir, &opts).unwrap_err();
    match err {
        HarnessError::Rung { crf, .. } => assert_eq!(crf, 99),
        other => panic!("expected Rung, got {other:?}"),
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(workdir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["partial"], serde_json::Value::Bool(true));
    assert_eq!(manifest["failed_crf"], serde_json::json!(99));
    // The healthy rung persisted.
    let rungs = manifest["rungs"].as_array().unwrap();
    assert_eq!(rungs.len(), 1);
    assert_eq!(rungs[0]["crf"], serde_json::json!(21));
}

#[test]
fn self_comparison_flags_unbounded_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let first = rd_sweep(
        &mock_spec(),
        &input,
        &input,
        &dir.path().join("first"),
        &SweepOptions {
            crf_list: vec![27],
            ..Default::default()
        },
    )
    .unwrap();
    // The mock's quantization is idempotent, so re-encoding its own decode
    // reproduces it exactly and PSNR against it is unbounded.
    let decoded = first.rungs[0].decoded_path.clone();
    let second = rd_sweep(
        &mock_spec(),
        &decoded,
        &decoded,
        &dir.path().join("second"),
        &SweepOptions {
            crf_list: vec![27],
            ..Default::default()
        },
    )
    .unwrap();
    assert!(second.rungs[0].quality["psnr"].is_none());
    // An unbounded rung cannot yield a finite RD point.
    let err = second.curve("psnr").unwrap_err();
    assert!(err.to_string().contains("unbounded"));
}

#[test]
fn empty_and_duplicate_ladders_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    for crf_list in [vec![], vec![24, 24]] {
        let opts = SweepOptions {
            crf_list,
            ..Default::default()
        };
        let err = rd_sweep(&mock_spec(), &input, &input, &dir.path().join("w"), &opts);
        assert!(matches!(err, Err(HarnessError::Precondition(_))));
    }
}

#[test]
fn external_scores_attach_strictly() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let sweep = rd_sweep(
        &mock_spec(),
        &input,
        &input,
        &dir.path().join("sweep"),
        &SweepOptions::default(),
    )
    .unwrap();

    let write_csv = |name: &str, body: &str| -> PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };

    let good = write_csv(
        "good.csv",
        "crf,score\n21,95.1\n24,93.0\n27,90.2\n30,86.5\n33,81.9\n",
    );
    let curve = import_external_scores(&sweep, &good, "vmaf").unwrap();
    assert_eq!(curve.metric_name(), "vmaf");
    assert_eq!(curve.points().len(), 5);
    // Rates ascend, so scores appear in reverse ladder order.
    assert_eq!(curve.points()[0].quality, 81.9);

    let missing = write_csv("missing.csv", "crf,score\n21,95.1\n24,93.0\n30,86.5\n33,81.9\n");
    let err = import_external_scores(&sweep, &missing, "vmaf").unwrap_err();
    assert!(err.to_string().contains("missing crf [27]"), "{err}");

    let extra = write_csv(
        "extra.csv",
        "crf,score\n18,97.0\n21,95.1\n24,93.0\n27,90.2\n30,86.5\n33,81.9\n",
    );
    let err = import_external_scores(&sweep, &extra, "vmaf").unwrap_err();
    assert!(err.to_string().contains("unknown crf [18]"), "{err}");

    let duplicate = write_csv(
        "duplicate.csv",
        "crf,score\n21,95.1\n24,93.0\n24,92.9\n27,90.2\n30,86.5\n33,81.9\n",
    );
    let err = import_external_scores(&sweep, &duplicate, "vmaf").unwrap_err();
    assert!(err.to_string().contains("duplicate crf [24]"), "{err}");

    let bad_header = write_csv("bad_header.csv", "crf,vmaf\n21,95.1\n");
    let err = import_external_scores(&sweep, &bad_header, "vmaf").unwrap_err();
    assert!(err.to_string().contains("crf,score"), "{err}");
}
