//! `adasharp degrade`: generate the low-quality half of a training pair.

use std::path::PathBuf;

use adasharp_core::degrade::{degrade_direct, degrade_fixed_point, DegradeMode};
use adasharp_core::y4m::{read_y4m_file, write_y4m_file};
use adasharp_core::{AlphaTable, Sequence};

use super::{ensure_parent, mask_source, RdoFlags};
use crate::args::parse_alpha_table;
use crate::fail::Fail;
use crate::frames::{default_jobs, par_map_frames};

#[derive(Debug, clap::Args)]
pub struct DegradeArgs {
    /// Ground-truth input sequence (Y4M).
    #[arg(long)]
    pub input: PathBuf,
    /// Output path for the degraded sequence (Y4M).
    #[arg(long)]
    pub output: PathBuf,
    /// Degradation reading: blur the ground truth (direct) or solve the
    /// implicit form (fixedpoint), the exact inverse of sharpening.
    #[arg(long, default_value = "direct")]
    pub mode: DegradeMode,
    /// Per-CU-size strengths as 8:a,16:b,32:c,64:d.
    #[arg(long = "alpha-table", value_parser = parse_alpha_table,
          default_value = "8:1.5,16:3,32:3,64:1.5")]
    pub alpha_table: AlphaTable,
    /// Per-frame mask files (frame-index pattern, e.g. masks/m%05d.pgm).
    /// Without this, each frame is partitioned in-process using the RDO
    /// flags below.
    #[arg(long)]
    pub masks: Option<String>,
    #[command(flatten)]
    pub rdo: RdoFlags,
    /// Fixed-point convergence tolerance (largest per-pixel step change).
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Fixed-point iteration cap.
    #[arg(long = "max-iter", default_value_t = 200)]
    pub max_iter: usize,
    /// Worker threads for per-frame work.
    #[arg(long, default_value_t = default_jobs())]
    pub jobs: usize,
}

pub fn run(args: &DegradeArgs) -> Result<(), Fail> {
    if !(args.tol > 0.0) {
        return Err(Fail::usage(format!("--tol must be > 0, got {}", args.tol)));
    }
    if args.max_iter == 0 {
        return Err(Fail::usage("--max-iter must be at least 1"));
    }
    let source = mask_source(&args.masks, &args.rdo)?;
    let table = args.alpha_table;
    let seq = read_y4m_file(&args.input)?;

    let results = par_map_frames(&seq.frames, args.jobs, |i, frame| {
        let mask = source.mask_for(frame, i)?;
        let (degraded, _) = match args.mode {
            DegradeMode::Direct => degrade_direct(frame, &mask, &table)?,
            DegradeMode::FixedPoint => {
                degrade_fixed_point(frame, &mask, &table, args.tol, args.max_iter)?
            }
        };
        let mean_alpha = mask
            .values()
            .iter()
            .map(|&s| table.alpha_for(s))
            .sum::<f64>()
            / mask.values().len() as f64;
        Ok((degraded, mean_alpha))
    })?;

    let mean_alpha =
        results.iter().map(|(_, a)| a).sum::<f64>() / results.len() as f64;
    let frames = results.into_iter().map(|(frame, _)| frame).collect();
    let out = Sequence::new(frames, seq.fps_num, seq.fps_den)?;
    ensure_parent(&args.output)?;
    write_y4m_file(&out, &args.output)?;

    println!(
        "degraded {} frames ({} mode) -> {}",
        out.frames.len(),
        args.mode,
        args.output.display()
    );
    println!("mean alpha applied: {mean_alpha:.4}");
    Ok(())
}
