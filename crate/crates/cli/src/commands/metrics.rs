//! `adasharp metrics`: quality report for a sequence pair.

use std::path::PathBuf;

use adasharp_core::metrics::{quality_report, QualityReport};
use adasharp_core::y4m::read_y4m_file;

use super::ensure_parent;
use crate::fail::Fail;

#[derive(Debug, clap::Args)]
pub struct MetricsArgs {
    /// Pristine reference sequence (Y4M).
    #[arg(long)]
    pub reference: PathBuf,
    /// Distorted sequence to score (Y4M).
    #[arg(long)]
    pub distorted: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// One-line human summary of the sequence-level scores.
pub fn summary_line(report: &QualityReport) -> String {
    let ms_ssim = report
        .ms_ssim
        .map(|v| format!("{v:.6}"))
        .unwrap_or_else(|| "n/a (frames below the 5-scale minimum)".into());
    format!(
        "psnr: {}, ms_ssim: {ms_ssim}, charbonnier: {:.6e}",
        report.psnr_db, report.charbonnier
    )
}

pub fn run(args: &MetricsArgs) -> Result<(), Fail> {
    let reference = read_y4m_file(&args.reference)?;
    let distorted = read_y4m_file(&args.distorted)?;
    let report = quality_report(&reference, &distorted)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Fail::internal(format!("report serialization: {e}")))?;
    match &args.output {
        Some(path) => {
            ensure_parent(path)?;
            std::fs::write(path, &json)
                .map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
            println!("{}", summary_line(&report));
            println!("report: {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}
