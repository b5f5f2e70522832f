//! `adasharp pipeline`: the whole chain from one config file.
//!
//! Stages: partition the input, degrade it into the low-quality pair,
//! sharpen the degraded sequence, score both against the input, and —
//! when an encoder is configured — sweep the CRF ladder over the degraded
//! (anchor) and sharpened conditions, compare them with BD-Rate, and plot
//! the RD curves. Artifacts land in the config's output directory; the
//! consolidated report is `report.json`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use adasharp_core::alpha::build_alpha_map;
use adasharp_core::degrade::{degrade_direct, degrade_fixed_point, DegradeMode};
use adasharp_core::metrics::{bd_rate, quality_report, BdRateResult, QualityReport, RdCurve};
use adasharp_core::partition::partition_frame;
use adasharp_core::pgm::write_mask_pgm_file;
use adasharp_core::sharpen::sharpen_adaptive;
use adasharp_core::y4m::{read_y4m_file, write_y4m_file};
use adasharp_core::{Frame, PartitionMask, Sequence};
use adasharp_harness::{rd_sweep, write_curve_csv, Metric, SweepOptions, SweepResult, SweepRung};

use super::ensure_parent;
use crate::config::PipelineConfig;
use crate::fail::Fail;
use crate::frames::{default_jobs, par_map_frames};
use crate::pattern::FramePattern;
use crate::plot::rd_plot_svg;

/// Iteration cap for fixed-point degradation; at the table's strongest
/// contraction this is far past convergence for any reachable tolerance.
const FIXED_POINT_MAX_ITER: usize = 200;

#[derive(Debug, clap::Args)]
pub struct PipelineArgs {
    /// Pipeline configuration file (JSON, unknown keys rejected).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's input sequence.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Override the config's output directory.
    #[arg(long = "output-dir")]
    pub output_dir: Option<PathBuf>,
    /// Override the CRF ladder (comma separated).
    #[arg(long = "crf", value_delimiter = ',')]
    pub crf: Option<Vec<u32>>,
    /// Override the metric list (comma separated).
    #[arg(long = "metrics", value_delimiter = ',')]
    pub metrics: Option<Vec<Metric>>,
    /// Override the strength-map feathering sigma.
    #[arg(long = "smooth-sigma")]
    pub smooth_sigma: Option<f64>,
    /// Override the degradation mode.
    #[arg(long = "degrade-mode")]
    pub degrade_mode: Option<DegradeMode>,
    /// Override the worker count.
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn apply_overrides(config: &mut PipelineConfig, args: &PipelineArgs) {
    if let Some(input) = &args.input {
        config.input = input.clone();
    }
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(crf) = &args.crf {
        config.crf_list = crf.clone();
    }
    if let Some(metrics) = &args.metrics {
        config.metrics = metrics.clone();
    }
    if let Some(sigma) = args.smooth_sigma {
        config.smooth_sigma = sigma;
    }
    if let Some(mode) = args.degrade_mode {
        config.degrade_mode = mode;
    }
    if let Some(jobs) = args.jobs {
        config.parallelism = Some(jobs);
    }
}

#[derive(Debug, Serialize)]
struct PartitionSummary {
    mask_pattern: String,
    total_leaves: usize,
    mean_leaves_per_frame: f64,
}

#[derive(Debug, Serialize)]
struct StageSummary {
    output: PathBuf,
    mean_alpha: f64,
}

#[derive(Debug, Serialize)]
struct CurveFiles {
    anchor: PathBuf,
    sharpened: PathBuf,
}

#[derive(Debug, Serialize)]
struct SweepSection {
    encoder: String,
    crf_list: Vec<u32>,
    anchor_workdir: PathBuf,
    sharpened_workdir: PathBuf,
    anchor_rungs: Vec<SweepRung>,
    sharpened_rungs: Vec<SweepRung>,
    curves: BTreeMap<String, CurveFiles>,
    /// BD-Rate of the sharpened condition against the anchor, per metric;
    /// negative means sharpening saves bits at equal quality.
    bd_rate: BTreeMap<String, BdRateResult>,
    plots: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Serialize)]
struct PipelineReport {
    input: PathBuf,
    output_dir: PathBuf,
    frames: usize,
    width: usize,
    height: usize,
    degrade_mode: DegradeMode,
    smooth_sigma: f64,
    partition: PartitionSummary,
    degrade: StageSummary,
    sharpen: StageSummary,
    degraded_vs_input: QualityReport,
    sharpened_vs_input: QualityReport,
    /// Absent when no encoder is configured.
    sweep: Option<SweepSection>,
    warnings: Vec<String>,
}

/// Both RD curves for one metric, or the reason they cannot be formed.
fn metric_curves(
    metric: Metric,
    anchor: &SweepResult,
    sharpened: &SweepResult,
) -> Result<(RdCurve, RdCurve), String> {
    let a = anchor
        .curve(metric.name())
        .map_err(|e| format!("{} anchor curve: {e}", metric.name()))?;
    let s = sharpened
        .curve(metric.name())
        .map_err(|e| format!("{} sharpened curve: {e}", metric.name()))?;
    Ok((a, s))
}

fn run_sweeps(
    config: &PipelineConfig,
    degraded_path: &PathBuf,
    sharpened_path: &PathBuf,
    warnings: &mut Vec<String>,
) -> Result<Option<SweepSection>, Fail> {
    let Some(spec) = &config.encoder else {
        println!("sweep: no encoder configured, skipping rate-quality stages");
        return Ok(None);
    };
    let opts = SweepOptions {
        crf_list: config.crf_list.clone(),
        metrics: config.metrics.clone(),
        parallelism: config.parallelism,
    };
    let anchor_workdir = config.output_dir.join("sweep_anchor");
    let sharpened_workdir = config.output_dir.join("sweep_sharpened");

    println!("sweep: encoding the degraded (anchor) condition");
    let anchor = rd_sweep(spec, degraded_path, &config.input, &anchor_workdir, &opts)
        .map_err(|e| Fail::from(e).stage("sweep (anchor)"))?;
    println!("sweep: encoding the sharpened condition");
    let sharpened = rd_sweep(spec, sharpened_path, &config.input, &sharpened_workdir, &opts)
        .map_err(|e| Fail::from(e).stage("sweep (sharpened)"))?;
    for warning in anchor.warnings.iter().chain(&sharpened.warnings) {
        warnings.push(warning.clone());
    }

    let mut curves = BTreeMap::new();
    let mut bd_map = BTreeMap::new();
    let mut plots = BTreeMap::new();
    for metric in &config.metrics {
        let name = metric.name();
        // Persist the per-condition curve CSVs.
        let anchor_csv = config.output_dir.join(format!("anchor_{name}.csv"));
        let sharpened_csv = config.output_dir.join(format!("sharpened_{name}.csv"));
        let mut written = true;
        for (path, sweep) in [(&anchor_csv, &anchor), (&sharpened_csv, &sharpened)] {
            if let Err(e) = write_curve_csv(path, sweep, name) {
                warnings.push(format!("no {name} curve: {e}"));
                written = false;
                break;
            }
        }
        if written {
            curves.insert(
                name.to_string(),
                CurveFiles {
                    anchor: anchor_csv,
                    sharpened: sharpened_csv,
                },
            );
        }

        // BD-Rate and the plot both need the in-memory curves; data-shaped
        // failures (unbounded scores, too few rungs, no quality overlap)
        // degrade to report warnings rather than aborting the pipeline.
        match metric_curves(*metric, &anchor, &sharpened) {
            Err(reason) => warnings.push(reason),
            Ok((anchor_curve, sharpened_curve)) => {
                match bd_rate(&anchor_curve, &sharpened_curve) {
                    Ok(bd) => {
                        warnings.extend(bd.warnings.iter().cloned());
                        println!(
                            "bd-rate ({name}): {:+.4}% over quality [{:.4}, {:.4}]",
                            bd.bd_rate_percent, bd.overlap.0, bd.overlap.1
                        );
                        bd_map.insert(name.to_string(), bd);
                    }
                    Err(e) => warnings.push(format!("bd-rate ({name}): {e}")),
                }
                let svg = rd_plot_svg(
                    &format!("rate-quality: {name}"),
                    name,
                    &[
                        ("anchor (degraded)".to_string(), &anchor_curve),
                        ("sharpened".to_string(), &sharpened_curve),
                    ],
                );
                let plot_path = config.output_dir.join(format!("rd_{name}.svg"));
                std::fs::write(&plot_path, svg)
                    .map_err(|e| Fail::io(format!("{}: {e}", plot_path.display())))?;
                println!("plot: {}", plot_path.display());
                plots.insert(name.to_string(), plot_path);
            }
        }
    }

    Ok(Some(SweepSection {
        encoder: spec.name.clone(),
        crf_list: config.crf_list.clone(),
        anchor_workdir,
        sharpened_workdir,
        anchor_rungs: anchor.rungs,
        sharpened_rungs: sharpened.rungs,
        curves,
        bd_rate: bd_map,
        plots,
    }))
}

pub fn run(args: &PipelineArgs) -> Result<(), Fail> {
    let mut config = PipelineConfig::load(&args.config)?;
    apply_overrides(&mut config, args);
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| Fail::io(format!("{}: {e}", config.output_dir.display())))?;
    let jobs = config.parallelism.unwrap_or_else(default_jobs);

    // Partition.
    let seq = read_y4m_file(&config.input).map_err(|e| Fail::from(e).stage("partition"))?;
    let pattern_string = config
        .output_dir
        .join("masks/frame%05d.pgm")
        .to_string_lossy()
        .into_owned();
    let mask_pattern = FramePattern::parse(&pattern_string).expect("literal pattern");
    ensure_parent(&mask_pattern.path(0)).map_err(|e| e.stage("partition"))?;
    let masks: Vec<PartitionMask> = par_map_frames(&seq.frames, jobs, |i, frame| {
        let mask = partition_frame(frame, &config.rdo)?;
        write_mask_pgm_file(&mask, mask_pattern.path(i))?;
        Ok(mask)
    })
    .map_err(|e| e.stage("partition"))?;
    let total_leaves: usize = masks.iter().map(|m| m.leaf_count()).sum();
    let mean_leaves = total_leaves as f64 / masks.len() as f64;
    println!(
        "partition: {} masks, {total_leaves} leaves total, {mean_leaves:.1} leaves/frame",
        masks.len()
    );

    // Degrade.
    let degrade_one = |i: usize, frame: &Frame| -> Result<(Frame, f64), Fail> {
        let (degraded, _) = match config.degrade_mode {
            DegradeMode::Direct => degrade_direct(frame, &masks[i], &config.alpha_table)?,
            DegradeMode::FixedPoint => degrade_fixed_point(
                frame,
                &masks[i],
                &config.alpha_table,
                config.fixed_point_tol,
                FIXED_POINT_MAX_ITER,
            )?,
        };
        let table = &config.alpha_table;
        let mean = masks[i]
            .values()
            .iter()
            .map(|&s| table.alpha_for(s))
            .sum::<f64>()
            / masks[i].values().len() as f64;
        Ok((degraded, mean))
    };
    let results =
        par_map_frames(&seq.frames, jobs, degrade_one).map_err(|e| e.stage("degrade"))?;
    let degrade_mean_alpha =
        results.iter().map(|(_, a)| a).sum::<f64>() / results.len() as f64;
    let degraded_frames: Vec<Frame> = results.into_iter().map(|(f, _)| f).collect();
    let degraded_seq = Sequence::new(degraded_frames, seq.fps_num, seq.fps_den)
        .map_err(|e| Fail::from(e).stage("degrade"))?;
    let degraded_path = config.output_dir.join("degraded.y4m");
    write_y4m_file(&degraded_seq, &degraded_path).map_err(|e| Fail::from(e).stage("degrade"))?;
    println!(
        "degrade: {} mode, mean alpha {degrade_mean_alpha:.4} -> {}",
        config.degrade_mode,
        degraded_path.display()
    );

    // Sharpen the degraded sequence with the same masks.
    let sharpen_one = |i: usize, frame: &Frame| -> Result<(Frame, f64), Fail> {
        let amap = build_alpha_map(&masks[i], &config.alpha_table, config.smooth_sigma)?;
        Ok((sharpen_adaptive(frame, &amap)?, amap.mean()))
    };
    let results = par_map_frames(&degraded_seq.frames, jobs, sharpen_one)
        .map_err(|e| e.stage("sharpen"))?;
    let sharpen_mean_alpha =
        results.iter().map(|(_, a)| a).sum::<f64>() / results.len() as f64;
    let sharpened_frames: Vec<Frame> = results.into_iter().map(|(f, _)| f).collect();
    let sharpened_seq = Sequence::new(sharpened_frames, seq.fps_num, seq.fps_den)
        .map_err(|e| Fail::from(e).stage("sharpen"))?;
    let sharpened_path = config.output_dir.join("sharpened.y4m");
    write_y4m_file(&sharpened_seq, &sharpened_path)
        .map_err(|e| Fail::from(e).stage("sharpen"))?;
    println!(
        "sharpen: sigma {}, mean alpha {sharpen_mean_alpha:.4} -> {}",
        config.smooth_sigma,
        sharpened_path.display()
    );

    // Score both conditions against the input.
    let degraded_vs_input =
        quality_report(&seq, &degraded_seq).map_err(|e| Fail::from(e).stage("metrics"))?;
    let sharpened_vs_input =
        quality_report(&seq, &sharpened_seq).map_err(|e| Fail::from(e).stage("metrics"))?;
    println!(
        "metrics: degraded {}, sharpened {}",
        super::metrics::summary_line(&degraded_vs_input),
        super::metrics::summary_line(&sharpened_vs_input)
    );

    // Rate-quality stages when an encoder is configured.
    let mut warnings = Vec::new();
    let sweep = run_sweeps(&config, &degraded_path, &sharpened_path, &mut warnings)?;

    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let report = PipelineReport {
        input: config.input.clone(),
        output_dir: config.output_dir.clone(),
        frames: seq.frames.len(),
        width: seq.width(),
        height: seq.height(),
        degrade_mode: config.degrade_mode,
        smooth_sigma: config.smooth_sigma,
        partition: PartitionSummary {
            mask_pattern: pattern_string,
            total_leaves,
            mean_leaves_per_frame: mean_leaves,
        },
        degrade: StageSummary {
            output: degraded_path,
            mean_alpha: degrade_mean_alpha,
        },
        sharpen: StageSummary {
            output: sharpened_path,
            mean_alpha: sharpen_mean_alpha,
        },
        degraded_vs_input,
        sharpened_vs_input,
        sweep,
        warnings,
    };
    let report_path = config.output_dir.join("report.json");
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Fail::internal(format!("report serialization: {e}")))?;
    std::fs::write(&report_path, json)
        .map_err(|e| Fail::io(format!("{}: {e}", report_path.display())))?;
    println!("report: {}", report_path.display());
    Ok(())
}
