//! RD-curve CSV files and external score import.
//!
//! Curve files carry one rung per row under the header
//! `crf,rate_kbps,<metric_name>` — the third column is named after the
//! metric, so the file is self-describing. External scores (metrics this
//! toolkit does not compute, like VMAF) arrive as `crf,score` CSVs and
//! are matched to a sweep's rungs strictly: every swept CRF exactly once,
//! nothing extra.

use std::collections::BTreeMap;
use std::path::Path;

use adasharp_core::metrics::{RdCurve, RdPoint};

use crate::error::HarnessError;
use crate::sweep::SweepResult;

/// One row of a curve file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub crf: u32,
    pub rate_kbps: f64,
    pub value: f64,
}

fn csv_err(path: &Path, message: impl std::fmt::Display) -> HarnessError {
    HarnessError::Import(format!("{}: {message}", path.display()))
}

/// Writes a sweep's rungs for one metric as a curve CSV.
pub fn write_curve_csv(
    path: &Path,
    sweep: &SweepResult,
    metric_name: &str,
) -> Result<(), HarnessError> {
    let mut rows = Vec::with_capacity(sweep.rungs.len());
    for rung in &sweep.rungs {
        let value = rung
            .quality
            .get(metric_name)
            .ok_or_else(|| {
                HarnessError::Precondition(format!(
                    "crf {}: metric '{metric_name}' was not scored in this sweep",
                    rung.crf
                ))
            })?
            .ok_or_else(|| {
                HarnessError::Precondition(format!(
                    "crf {}: {metric_name} is unbounded; cannot write a finite curve",
                    rung.crf
                ))
            })?;
        rows.push(CurveRow {
            crf: rung.crf,
            rate_kbps: rung.rate_kbps,
            value,
        });
    }
    write_curve_rows(path, metric_name, &rows)
}

/// Writes explicit rows as a curve CSV.
pub fn write_curve_rows(
    path: &Path,
    metric_name: &str,
    rows: &[CurveRow],
) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    writer
        .write_record(["crf", "rate_kbps", metric_name])
        .and_then(|_| {
            rows.iter().try_for_each(|r| {
                writer.write_record([
                    r.crf.to_string(),
                    r.rate_kbps.to_string(),
                    r.value.to_string(),
                ])
            })
        })
        .and_then(|_| writer.flush().map_err(Into::into))
        .map_err(|e| csv_err(path, e))
}

/// Reads a curve CSV; returns the metric name from the header and the
/// rows in file order.
pub fn read_curve_csv(path: &Path) -> Result<(String, Vec<CurveRow>), HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() != 3 || &headers[0] != "crf" || &headers[1] != "rate_kbps" {
        return Err(csv_err(
            path,
            format!(
                "expected header 'crf,rate_kbps,<metric>', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let metric_name = headers[2].to_string();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let field = |j: usize| -> Result<&str, HarnessError> {
            record
                .get(j)
                .ok_or_else(|| csv_err(path, format!("row {}: missing column {j}", i + 2)))
        };
        rows.push(CurveRow {
            crf: field(0)?
                .parse()
                .map_err(|e| csv_err(path, format!("row {}: bad crf: {e}", i + 2)))?,
            rate_kbps: field(1)?
                .parse()
                .map_err(|e| csv_err(path, format!("row {}: bad rate: {e}", i + 2)))?,
            value: field(2)?
                .parse()
                .map_err(|e| csv_err(path, format!("row {}: bad {metric_name}: {e}", i + 2)))?,
        });
    }
    Ok((metric_name, rows))
}

/// Turns curve rows into an [`RdCurve`], sorting by rate.
pub fn curve_from_rows(metric_name: &str, rows: &[CurveRow]) -> Result<RdCurve, HarnessError> {
    let mut points: Vec<RdPoint> = rows
        .iter()
        .map(|r| RdPoint {
            rate_kbps: r.rate_kbps,
            quality: r.value,
        })
        .collect();
    points.sort_by(|a, b| a.rate_kbps.total_cmp(&b.rate_kbps));
    Ok(RdCurve::new(metric_name, points)?)
}

/// Attaches externally computed scores (CSV with header `crf,score`) to
/// a sweep's rungs, producing an RD curve for a metric this toolkit does
/// not compute itself. Every swept CRF must appear exactly once and no
/// others; all offenders are listed in one error.
pub fn import_external_scores(
    sweep: &SweepResult,
    csv_path: &Path,
    metric_name: &str,
) -> Result<RdCurve, HarnessError> {
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| csv_err(csv_path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(csv_path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "crf" || &headers[1] != "score" {
        return Err(csv_err(
            csv_path,
            format!(
                "expected header 'crf,score', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut scores: BTreeMap<u32, f64> = BTreeMap::new();
    let mut duplicate = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(csv_path, e))?;
        let crf: u32 = record
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|e| csv_err(csv_path, format!("row {}: bad crf: {e}", i + 2)))?;
        let score: f64 = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e| csv_err(csv_path, format!("row {}: bad score: {e}", i + 2)))?;
        if scores.insert(crf, score).is_some() {
            duplicate.push(crf);
        }
    }

    let swept: Vec<u32> = sweep.rungs.iter().map(|r| r.crf).collect();
    let missing: Vec<u32> = swept
        .iter()
        .filter(|c| !scores.contains_key(c))
        .copied()
        .collect();
    let unknown: Vec<u32> = scores
        .keys()
        .filter(|c| !swept.contains(c))
        .copied()
        .collect();
    if !(missing.is_empty() && unknown.is_empty() && duplicate.is_empty()) {
        let mut parts = Vec::new();
        if !missing.is_empty() {
            parts.push(format!("missing crf {missing:?}"));
        }
        if !unknown.is_empty() {
            parts.push(format!("unknown crf {unknown:?}"));
        }
        if !duplicate.is_empty() {
            parts.push(format!("duplicate crf {duplicate:?}"));
        }
        return Err(csv_err(csv_path, parts.join("; ")));
    }

    let rows: Vec<CurveRow> = sweep
        .rungs
        .iter()
        .map(|r| CurveRow {
            crf: r.crf,
            rate_kbps: r.rate_kbps,
            value: scores[&r.crf],
        })
        .collect();
    curve_from_rows(metric_name, &rows)
}
