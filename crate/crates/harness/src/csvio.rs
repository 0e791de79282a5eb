//! CSV emission and parsing for trial traces and aggregate curves.
//!
//! UTF-8, header row, `.` decimal separator. Floats are written in Rust's
//! shortest round-trip form, so parsing an emitted file recovers the exact
//! bit pattern and re-aggregation reproduces aggregate files byte for byte.

use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::stats::AggregateCurve;

/// One checkpoint row of a trial trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRow {
    pub iteration: u64,
    pub error: f64,
    pub queries: u64,
}

pub const TRIAL_HEADER: &str = "iteration,error,queries";
pub const AGGREGATE_HEADER: &str = "iteration,mean,ci_low,ci_high";

pub fn trial_csv_string(rows: &[TrialRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 32 + 32);
    out.push_str(TRIAL_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.iteration, row.error, row.queries));
    }
    out
}

pub fn write_trial_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    std::fs::write(path, trial_csv_string(rows))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_trial_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(TRIAL_HEADER) => {}
        other => bail!("{}: expected header {TRIAL_HEADER:?}, got {other:?}", path.display()),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let parse_err = || format!("{}: malformed row {}", path.display(), i + 2);
        let iteration = parts
            .next()
            .and_then(|s| s.parse().ok())
            .with_context(parse_err)?;
        let error = parts
            .next()
            .and_then(|s| s.parse().ok())
            .with_context(parse_err)?;
        let queries = parts
            .next()
            .and_then(|s| s.parse().ok())
            .with_context(parse_err)?;
        if parts.next().is_some() {
            bail!("{}: trailing fields in row {}", path.display(), i + 2);
        }
        rows.push(TrialRow {
            iteration,
            error,
            queries,
        });
    }
    Ok(rows)
}

pub fn aggregate_csv_string(curve: &AggregateCurve) -> String {
    let mut out = String::with_capacity(curve.checkpoints.len() * 48 + 32);
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for i in 0..curve.checkpoints.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            curve.checkpoints[i],
            curve.mean[i],
            curve.ci_low(i),
            curve.ci_high(i)
        ));
    }
    out
}

pub fn write_aggregate_csv(path: &Path, curve: &AggregateCurve) -> Result<()> {
    std::fs::write(path, aggregate_csv_string(curve))
        .with_context(|| format!("writing {}", path.display()))
}

/// Reads an aggregate file back; the label comes from the file stem with the
/// `.aggregate` suffix stripped. Trial count is not stored in the file, so
/// the returned curve reports 0 there.
pub fn read_aggregate_csv(path: &Path) -> Result<AggregateCurve> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(AGGREGATE_HEADER) => {}
        other => bail!(
            "{}: expected header {AGGREGATE_HEADER:?}, got {other:?}",
            path.display()
        ),
    }
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("curve")
        .trim_end_matches(".aggregate")
        .to_string();
    let mut curve = AggregateCurve {
        label,
        checkpoints: Vec::new(),
        mean: Vec::new(),
        ci_half: Vec::new(),
        trials: 0,
    };
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            bail!("{}: malformed row {}", path.display(), i + 2);
        }
        let iteration: u64 = fields[0]
            .parse()
            .with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let mean: f64 = fields[1]
            .parse()
            .with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let low: f64 = fields[2]
            .parse()
            .with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        curve.checkpoints.push(iteration);
        curve.mean.push(mean);
        curve.ci_half.push(mean - low);
    }
    Ok(curve)
}

/// Filesystem-safe form of a method label.
pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
