//! CRF-ladder sweeps: encode, measure, decode, score.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use adasharp_core::metrics::{
    charbonnier_frames, ms_ssim_frames, psnr_sequences, RdCurve, RdPoint,
};
use adasharp_core::y4m::{probe_y4m_file, read_y4m_file};
use adasharp_core::{CoreError, Sequence};

use crate::error::HarnessError;
use crate::spec::{resolve_binary, EncoderSpec};

/// The CRF ladder used throughout evaluation when none is given.
pub const DEFAULT_CRF_LADDER: [u32; 5] = [21, 24, 27, 30, 33];

/// A quality metric the sweep can compute locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Psnr,
    MsSsim,
    Charbonnier,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Psnr => "psnr",
            Metric::MsSsim => "ms_ssim",
            Metric::Charbonnier => "charbonnier",
        }
    }

    /// Sequence-level score against the reference; `None` marks an
    /// unbounded value (PSNR of identical sequences).
    fn score(&self, reference: &Sequence, distorted: &Sequence) -> Result<Option<f64>, CoreError> {
        let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        match self {
            Metric::Psnr => Ok(psnr_sequences(reference, distorted)?.as_db()),
            Metric::MsSsim => Ok(Some(mean(per_frame(
                reference,
                distorted,
                ms_ssim_frames,
            )?))),
            Metric::Charbonnier => Ok(Some(mean(per_frame(
                reference,
                distorted,
                charbonnier_frames,
            )?))),
        }
    }
}

fn per_frame(
    reference: &Sequence,
    distorted: &Sequence,
    f: impl Fn(&adasharp_core::Frame, &adasharp_core::Frame) -> Result<f64, CoreError>,
) -> Result<Vec<f64>, CoreError> {
    if reference.frames.len() != distorted.frames.len() {
        return Err(CoreError::Precondition(format!(
            "reference has {} frames, distorted {}",
            reference.frames.len(),
            distorted.frames.len()
        )));
    }
    reference
        .frames
        .iter()
        .zip(&distorted.frames)
        .map(|(r, d)| f(r, d))
        .collect()
}

impl std::str::FromStr for Metric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psnr" => Ok(Metric::Psnr),
            "ms_ssim" => Ok(Metric::MsSsim),
            "charbonnier" => Ok(Metric::Charbonnier),
            other => Err(HarnessError::Precondition(format!(
                "unknown metric '{other}' (expected psnr, ms_ssim, or charbonnier)"
            ))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sweep knobs beyond the encoder spec itself.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// CRF rungs to encode; must be nonempty and distinct.
    pub crf_list: Vec<u32>,
    /// Metrics scored against the reference.
    pub metrics: Vec<Metric>,
    /// Maximum concurrent rungs; `None` runs all rungs at once.
    pub parallelism: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            crf_list: DEFAULT_CRF_LADDER.to_vec(),
            metrics: vec![Metric::Psnr],
            parallelism: None,
        }
    }
}

/// One completed rung.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRung {
    pub crf: u32,
    pub rate_kbps: f64,
    /// Metric name → score; `None` marks an unbounded value (PSNR of a
    /// distorted output identical to the reference).
    pub quality: BTreeMap<String, Option<f64>>,
    pub bitstream_path: PathBuf,
    pub decoded_path: PathBuf,
}

/// All rungs of a sweep, sorted by CRF ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub encoder: String,
    pub rungs: Vec<SweepRung>,
    /// Non-fatal observations, e.g. rate inversions along the ladder.
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// RD curve for one metric, points sorted by rate. Fails if a rung
    /// lacks the metric or scored it as unbounded — an unbounded score
    /// has no finite RD point.
    pub fn curve(&self, metric_name: &str) -> Result<RdCurve, HarnessError> {
        let mut points = Vec::with_capacity(self.rungs.len());
        for rung in &self.rungs {
            let value = rung.quality.get(metric_name).ok_or_else(|| {
                HarnessError::Precondition(format!(
                    "crf {}: metric '{metric_name}' was not scored in this sweep",
                    rung.crf
                ))
            })?;
            let quality = value.ok_or_else(|| {
                HarnessError::Precondition(format!(
                    "crf {}: {metric_name} is unbounded (distorted output identical \
                     to the reference); no finite RD point",
                    rung.crf
                ))
            })?;
            points.push(RdPoint {
                rate_kbps: rung.rate_kbps,
                quality,
            });
        }
        points.sort_by(|a, b| a.rate_kbps.total_cmp(&b.rate_kbps));
        Ok(RdCurve::new(metric_name, points)?)
    }
}

/// Sweep description persisted as `manifest.json` in the workdir. A
/// manifest with `partial: true` records the rungs that completed before
/// a failure aborted the sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepManifest {
    pub encoder: String,
    pub preset: String,
    pub input: PathBuf,
    pub reference: PathBuf,
    pub crf_list: Vec<u32>,
    pub partial: bool,
    /// CRF of the rung whose failure aborted the sweep, if any.
    pub failed_crf: Option<u32>,
    pub rungs: Vec<SweepRung>,
    pub warnings: Vec<String>,
}

fn write_manifest(workdir: &Path, manifest: &SweepManifest) -> Result<(), HarnessError> {
    let path = workdir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| HarnessError::Precondition(format!("manifest serialization: {e}")))?;
    std::fs::write(&path, json).map_err(|e| HarnessError::io(path.display().to_string(), e))
}

/// Measured bitrate in kilobits (1000 bits) per second.
fn rate_kbps(bitstream_bytes: u64, frames: usize, fps_num: u32, fps_den: u32) -> f64 {
    // bytes*8 / (frames*den/num) / 1000, arranged to divide once.
    (bitstream_bytes as f64 * 8.0 * fps_num as f64)
        / (frames as f64 * fps_den as f64 * 1000.0)
}

/// Runs one child command, captures its output, and writes stderr to
/// `log_path`. The first argv element is resolved via
/// ADASHARP_ENCODER_PATH and PATH before spawning, so a missing binary is
/// reported as such rather than as a spawn failure — and nothing is
/// written in that case.
fn run_child(argv: &[String], log_path: &Path) -> Result<(), HarnessError> {
    let program = argv
        .first()
        .ok_or_else(|| HarnessError::Template("empty command template".into()))?;
    let resolved = resolve_binary(program)?;
    let output = Command::new(&resolved)
        .args(&argv[1..])
        .stdin(std::process::Stdio::null())
        .output()
        .map_err(|e| HarnessError::io(resolved.display().to_string(), e))?;
    let stderr = String::from_utf8_lossy(&output.stderr);
    // The run log keeps encoder diagnostics even for successful rungs.
    let _ = std::fs::write(log_path, stderr.as_bytes());
    if !output.status.success() {
        return Err(HarnessError::ChildFailed {
            program: program.clone(),
            status: output.status.to_string(),
            stderr: stderr.into_owned(),
        });
    }
    Ok(())
}

fn check_output(program: &str, path: &Path) -> Result<u64, HarnessError> {
    match std::fs::metadata(path) {
        Ok(meta) if meta.len() > 0 => Ok(meta.len()),
        _ => {
            // Drop a zero-byte file so failed rungs leave nothing behind.
            let _ = std::fs::remove_file(path);
            Err(HarnessError::EmptyOutput {
                program: program.to_string(),
                path: path.to_path_buf(),
            })
        }
    }
}

/// Encodes one rung into `workdir/crf<NN>.bin` and measures its rate.
pub fn run_encode(
    spec: &EncoderSpec,
    input: &Path,
    crf: u32,
    workdir: &Path,
) -> Result<(PathBuf, f64), HarnessError> {
    spec.validate()?;
    std::fs::create_dir_all(workdir)
        .map_err(|e| HarnessError::io(workdir.display().to_string(), e))?;
    let (header, frames) = probe_y4m_file(input)?;
    let bitstream = workdir.join(format!("crf{crf:02}.bin"));
    let argv = spec.encode_argv(input, &bitstream, crf);
    let log = workdir.join(format!("crf{crf:02}.encode.log"));
    if let Err(e) = run_child(&argv, &log) {
        let _ = std::fs::remove_file(&bitstream);
        return Err(e);
    }
    let bytes = check_output(&argv[0], &bitstream)?;
    let rate = rate_kbps(bytes, frames, header.fps_num, header.fps_den);
    Ok((bitstream, rate))
}

/// Decodes a bitstream back to Y4M.
fn run_decode(spec: &EncoderSpec, bitstream: &Path, decoded: &Path) -> Result<(), HarnessError> {
    let argv = spec.decode_argv(bitstream, decoded);
    let log = decoded.with_extension("decode.log");
    if let Err(e) = run_child(&argv, &log) {
        let _ = std::fs::remove_file(decoded);
        return Err(e);
    }
    check_output(&argv[0], decoded)?;
    Ok(())
}

fn run_rung(
    spec: &EncoderSpec,
    input: &Path,
    reference: &Sequence,
    metrics: &[Metric],
    crf: u32,
    workdir: &Path,
) -> Result<SweepRung, HarnessError> {
    let (bitstream, rate) = run_encode(spec, input, crf, workdir)?;
    let decoded = workdir.join(format!("crf{crf:02}.y4m"));
    run_decode(spec, &bitstream, &decoded)?;
    let distorted = read_y4m_file(&decoded)?;
    let mut quality = BTreeMap::new();
    for metric in metrics {
        quality.insert(metric.name().to_string(), metric.score(reference, &distorted)?);
    }
    Ok(SweepRung {
        crf,
        rate_kbps: rate,
        quality,
        bitstream_path: bitstream,
        decoded_path: decoded,
    })
}

fn check_options(opts: &SweepOptions) -> Result<(), HarnessError> {
    if opts.crf_list.is_empty() {
        return Err(HarnessError::Precondition(
            "crf list must contain at least one rung".into(),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    let dupes: Vec<u32> = opts
        .crf_list
        .iter()
        .filter(|&&c| !seen.insert(c))
        .copied()
        .collect();
    if !dupes.is_empty() {
        return Err(HarnessError::Precondition(format!(
            "crf list contains duplicates: {dupes:?}"
        )));
    }
    if opts.parallelism == Some(0) {
        return Err(HarnessError::Precondition(
            "parallelism must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Sweeps the CRF ladder. Rungs run concurrently (bounded by
/// `opts.parallelism`, default all at once); aggregation is
/// deterministic — rungs are reported sorted by CRF regardless of
/// completion order. On any rung failure the sweep aborts: rungs already
/// finished are persisted in the manifest with `partial: true`, no new
/// rungs are started, and the error names the failing rung.
pub fn rd_sweep(
    spec: &EncoderSpec,
    input: &Path,
    reference: &Path,
    workdir: &Path,
    opts: &SweepOptions,
) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    check_options(opts)?;
    std::fs::create_dir_all(workdir)
        .map_err(|e| HarnessError::io(workdir.display().to_string(), e))?;
    let reference_seq = read_y4m_file(reference)?;

    let n = opts.crf_list.len();
    let workers = opts.parallelism.unwrap_or(n).min(n);
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<Result<SweepRung, HarnessError>>>> =
        Mutex::new((0..n).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n || abort.load(Ordering::SeqCst) {
                    break;
                }
                let crf = opts.crf_list[i];
                let result = run_rung(spec, input, &reference_seq, &opts.metrics, crf, workdir);
                if result.is_err() {
                    abort.store(true, Ordering::SeqCst);
                }
                slots.lock().expect("rung slot lock")[i] = Some(result);
            });
        }
    });

    let mut completed = Vec::new();
    let mut failed: Option<(u32, HarnessError)> = None;
    for (i, slot) in slots.into_inner().expect("rung slot lock").into_iter().enumerate() {
        match slot {
            Some(Ok(rung)) => completed.push(rung),
            Some(Err(e)) => {
                let crf = opts.crf_list[i];
                // Report the lowest failing CRF for determinism.
                if failed.as_ref().map_or(true, |(c, _)| crf < *c) {
                    failed = Some((crf, e));
                }
            }
            None => {} // never started: sweep aborted first
        }
    }
    completed.sort_by_key(|r| r.crf);

    let mut warnings = Vec::new();
    for pair in completed.windows(2) {
        if pair[1].rate_kbps > pair[0].rate_kbps {
            warnings.push(format!(
                "rate inversion: crf {} measured {:.3} kbps, above crf {}'s {:.3} kbps",
                pair[1].crf, pair[1].rate_kbps, pair[0].crf, pair[0].rate_kbps
            ));
        }
    }

    let manifest = SweepManifest {
        encoder: spec.name.clone(),
        preset: spec.preset.clone(),
        input: input.to_path_buf(),
        reference: reference.to_path_buf(),
        crf_list: opts.crf_list.clone(),
        partial: failed.is_some(),
        failed_crf: failed.as_ref().map(|(c, _)| *c),
        rungs: completed.clone(),
        warnings: warnings.clone(),
    };
    write_manifest(workdir, &manifest)?;

    match failed {
        Some((crf, source)) => Err(HarnessError::Rung {
            crf,
            source: Box::new(source),
        }),
        None => Ok(SweepResult {
            encoder: spec.name.clone(),
            rungs: completed,
            warnings,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_follows_the_bits_per_duration_definition() {
        // 4000 bytes over 8 frames at 30 fps: 32000 bits / (8/30 s) =
        // 120000 bit/s = 120 kbps, exactly.
        assert_eq!(rate_kbps(4000, 8, 30, 1), 120.0);
        // One byte over one frame at 1 fps: 8 bits/s.
        assert_eq!(rate_kbps(1, 1, 1, 1), 0.008);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::Psnr, Metric::MsSsim, Metric::Charbonnier] {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("vmaf".parse::<Metric>().is_err());
    }

    #[test]
    fn option_validation_catches_bad_ladders() {
        let mut opts = SweepOptions::default();
        assert!(check_options(&opts).is_ok());
        opts.crf_list = vec![];
        assert!(matches!(
            check_options(&opts),
            Err(HarnessError::Precondition(_))
        ));
        opts.crf_list = vec![21, 24, 21];
        let err = check_options(&opts).unwrap_err();
        assert!(err.to_string().contains("21"));
        opts.crf_list = vec![21];
        opts.parallelism = Some(0);
        assert!(check_options(&opts).is_err());
    }

    #[test]
    fn default_ladder_matches_the_evaluation_protocol() {
        assert_eq!(SweepOptions::default().crf_list, vec![21, 24, 27, 30, 33]);
    }
}
