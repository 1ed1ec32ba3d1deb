//! Atomic file output and the report CSV layout.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use wn_core::experiments::{BoundReport, RateReport};
use wn_core::io::format_value;

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn bound_reports_csv(reports: &[BoundReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "theorem", "n", "N", "p", "weights", "lhs", "rhs", "margin", "holds",
    ])?;
    for r in reports {
        w.write_record([
            r.theorem.id().to_string(),
            r.n.to_string(),
            r.big_n.to_string(),
            r.p.to_string(),
            r.weights.clone(),
            format_value(r.lhs),
            format_value(r.rhs),
            format_value(r.margin),
            r.holds.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn rate_report_csv(report: &RateReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "p", "mean", "n", "error", "fitted"])?;
    for (&n, &e) in report.orders.iter().zip(&report.errors) {
        let fitted = (report.fit.intercept + report.fit.slope * (n as f64).log2()).exp2();
        w.write_record([
            report.alpha.to_string(),
            report.p.to_string(),
            report.mean.clone(),
            n.to_string(),
            format_value(e),
            format_value(fitted),
        ])?;
    }
    Ok(w.into_inner()?)
}
