//! `adasharp rd-sweep`: drive an external encoder over a CRF ladder.

use std::path::PathBuf;

use adasharp_harness::curvefile::write_curve_rows;
use adasharp_harness::{
    import_external_scores, rd_sweep, write_curve_csv, CurveRow, EncoderSpec, HarnessError,
    Metric, SweepOptions, SweepResult, DEFAULT_CRF_LADDER,
};

use crate::fail::Fail;

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    /// Sequence to encode (Y4M).
    #[arg(long)]
    pub input: PathBuf,
    /// Pristine reference the decodes are scored against; defaults to the
    /// input itself.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Directory receiving bitstreams, decodes, logs, curve CSVs, and the
    /// manifest.
    #[arg(long)]
    pub workdir: PathBuf,
    /// Encoder label used in manifests and reports.
    #[arg(long = "encoder-name", default_value = "encoder")]
    pub encoder_name: String,
    /// Encode command template; must use {input}, {output}, {crf},
    /// {preset} exactly once each.
    #[arg(long = "encode-template")]
    pub encode_template: String,
    /// Decode command template; must use {input} and {output} exactly
    /// once each.
    #[arg(long = "decode-template")]
    pub decode_template: String,
    /// Value substituted for {preset}.
    #[arg(long, default_value = "medium")]
    pub preset: String,
    /// CRF rungs, comma separated.
    #[arg(long = "crf", value_delimiter = ',', default_values_t = DEFAULT_CRF_LADDER)]
    pub crf: Vec<u32>,
    /// Metrics to score, comma separated (psnr, ms_ssim, charbonnier).
    #[arg(long = "metrics", value_delimiter = ',', default_value = "psnr")]
    pub metrics: Vec<Metric>,
    /// Maximum concurrent rungs; default runs all rungs at once.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Attach externally computed scores as METRIC=CSV (header `crf,score`,
    /// exactly the swept rungs); emits a curve CSV for that metric.
    /// Repeatable.
    #[arg(long = "import-scores", value_name = "METRIC=CSV")]
    pub import_scores: Vec<String>,
}

/// Splits an `--import-scores METRIC=CSV` value.
fn parse_import(raw: &str) -> Result<(&str, &str), Fail> {
    match raw.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name, path)),
        _ => Err(Fail::usage(format!(
            "--import-scores expects METRIC=CSV, got '{raw}'"
        ))),
    }
}

/// Checks ladder and parallelism flags up front so violations surface as
/// flag errors, not late internal ones.
fn check_flags(args: &SweepArgs) -> Result<(), Fail> {
    if args.crf.is_empty() {
        return Err(Fail::usage("--crf must list at least one rung"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &crf in &args.crf {
        if !seen.insert(crf) {
            return Err(Fail::usage(format!("--crf repeats {crf}")));
        }
    }
    if args.jobs == Some(0) {
        return Err(Fail::usage("--jobs must be at least 1"));
    }
    let mut import_names = std::collections::BTreeSet::new();
    for raw in &args.import_scores {
        let (name, _) = parse_import(raw)?;
        if args.metrics.iter().any(|m| m.name() == name) {
            return Err(Fail::usage(format!(
                "--import-scores '{name}' collides with a metric computed by this sweep"
            )));
        }
        if !import_names.insert(name) {
            return Err(Fail::usage(format!("--import-scores repeats '{name}'")));
        }
    }
    Ok(())
}

fn print_rungs(sweep: &SweepResult, metrics: &[Metric]) {
    for rung in &sweep.rungs {
        let mut line = format!("crf {:2}: {:10.3} kbps", rung.crf, rung.rate_kbps);
        for metric in metrics {
            let shown = match rung.quality.get(metric.name()) {
                Some(Some(v)) => format!("{v:.4}"),
                Some(None) => "unbounded".to_string(),
                None => "-".to_string(),
            };
            line.push_str(&format!("  {} {shown}", metric.name()));
        }
        println!("{line}");
    }
}

pub fn run(args: &SweepArgs) -> Result<(), Fail> {
    check_flags(args)?;
    let spec = EncoderSpec {
        name: args.encoder_name.clone(),
        encode_template: args.encode_template.clone(),
        decode_template: args.decode_template.clone(),
        preset: args.preset.clone(),
    };
    // Template violations come from flags here, so they are usage errors.
    spec.validate().map_err(|e| Fail::usage(e.to_string()))?;

    let reference = args.reference.clone().unwrap_or_else(|| args.input.clone());
    let opts = SweepOptions {
        crf_list: args.crf.clone(),
        metrics: args.metrics.clone(),
        parallelism: args.jobs,
    };
    let sweep = rd_sweep(&spec, &args.input, &reference, &args.workdir, &opts)?;

    print_rungs(&sweep, &opts.metrics);
    for warning in &sweep.warnings {
        eprintln!("warning: {warning}");
    }
    for metric in &opts.metrics {
        let path = args.workdir.join(format!("{}.csv", metric.name()));
        match write_curve_csv(&path, &sweep, metric.name()) {
            Ok(()) => println!("curve: {}", path.display()),
            // An unbounded score has no finite RD point; the sweep itself
            // is still a valid result, so skip the curve rather than fail.
            Err(HarnessError::Precondition(msg)) => {
                eprintln!("warning: no {} curve: {msg}", metric.name())
            }
            Err(e) => return Err(e.into()),
        }
    }
    for raw in &args.import_scores {
        let (name, csv) = parse_import(raw)?;
        let curve = import_external_scores(&sweep, std::path::Path::new(csv), name)?;
        // The importer keeps rung rates untouched, so each curve point maps
        // back to its rung by exact rate equality.
        let rows: Vec<CurveRow> = sweep
            .rungs
            .iter()
            .map(|rung| CurveRow {
                crf: rung.crf,
                rate_kbps: rung.rate_kbps,
                value: curve
                    .points()
                    .iter()
                    .find(|p| p.rate_kbps == rung.rate_kbps)
                    .expect("imported curve covers every rung")
                    .quality,
            })
            .collect();
        let path = args.workdir.join(format!("{name}.csv"));
        write_curve_rows(&path, name, &rows)?;
        println!("curve (imported): {}", path.display());
    }
    println!("manifest: {}", args.workdir.join("manifest.json").display());
    Ok(())
}
