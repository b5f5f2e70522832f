//! `adasharp partition`: per-frame CTU quadtree masks as PGM files.

use std::path::PathBuf;

use adasharp_core::partition::partition_frame;
use adasharp_core::pgm::write_mask_pgm_file;
use adasharp_core::y4m::read_y4m_file;

use super::{ensure_parent, RdoFlags};
use crate::fail::Fail;
use crate::frames::{default_jobs, par_map_frames};
use crate::pattern::FramePattern;

#[derive(Debug, clap::Args)]
pub struct PartitionArgs {
    /// Input sequence (Y4M).
    #[arg(long)]
    pub input: PathBuf,
    /// Output PGM path pattern with a frame-index directive, e.g.
    /// masks/frame%05d.pgm.
    #[arg(long)]
    pub output: String,
    #[command(flatten)]
    pub rdo: RdoFlags,
    /// Worker threads for per-frame work.
    #[arg(long, default_value_t = default_jobs())]
    pub jobs: usize,
}

pub fn run(args: &PartitionArgs) -> Result<(), Fail> {
    let pattern = FramePattern::parse(&args.output).map_err(Fail::usage)?;
    let params = args.rdo.params()?;
    let seq = read_y4m_file(&args.input)?;
    ensure_parent(&pattern.path(0))?;

    let leaves = par_map_frames(&seq.frames, args.jobs, |i, frame| {
        let mask = partition_frame(frame, &params)?;
        write_mask_pgm_file(&mask, pattern.path(i))?;
        Ok(mask.leaf_count())
    })?;

    for (i, count) in leaves.iter().enumerate() {
        println!("frame {i:05}: {count} leaves -> {}", pattern.path(i).display());
    }
    let total: usize = leaves.iter().sum();
    println!(
        "{} frames, {} leaves total, {:.1} leaves/frame",
        leaves.len(),
        total,
        total as f64 / leaves.len() as f64
    );
    Ok(())
}
