//! `adasharp bdrate`: Bjontegaard delta rate between two curve CSVs.

use std::path::PathBuf;

use adasharp_core::metrics::bd_rate;
use adasharp_harness::curvefile::{curve_from_rows, read_curve_csv};

use super::ensure_parent;
use crate::fail::Fail;

#[derive(Debug, clap::Args)]
pub struct BdrateArgs {
    /// Anchor curve CSV (crf,rate_kbps,<metric>).
    #[arg(long)]
    pub anchor: PathBuf,
    /// Test curve CSV; negative BD-Rate means it saves bits.
    #[arg(long)]
    pub test: PathBuf,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &BdrateArgs) -> Result<(), Fail> {
    let (anchor_metric, anchor_rows) = read_curve_csv(&args.anchor)?;
    let (test_metric, test_rows) = read_curve_csv(&args.test)?;
    if anchor_metric != test_metric {
        return Err(Fail::io(format!(
            "metric mismatch: anchor measures '{anchor_metric}', test measures '{test_metric}'"
        )));
    }
    let anchor = curve_from_rows(&anchor_metric, &anchor_rows)?;
    let test = curve_from_rows(&test_metric, &test_rows)?;
    let bd = bd_rate(&anchor, &test)?;

    for warning in &bd.warnings {
        eprintln!("warning: {warning}");
    }
    let json = serde_json::json!({
        "metric": anchor_metric,
        "bd_rate_percent": bd.bd_rate_percent,
        "overlap_interval": [bd.overlap.0, bd.overlap.1],
        "warnings": bd.warnings,
    });
    let text = serde_json::to_string_pretty(&json)
        .map_err(|e| Fail::internal(format!("result serialization: {e}")))?;
    match &args.output {
        Some(path) => {
            ensure_parent(path)?;
            std::fs::write(path, &text)
                .map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
            println!(
                "bd-rate ({anchor_metric}): {:+.4}% over quality [{:.4}, {:.4}]",
                bd.bd_rate_percent, bd.overlap.0, bd.overlap.1
            );
            println!("result: {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}
