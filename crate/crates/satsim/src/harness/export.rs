//! Result serialization.
//!
//! Column contracts:
//!   final_state.csv   -> builder_id,quality,attention
//!   metrics.csv       -> name,value
//!   lorenz.csv        -> cum_population,cum_share
//!   rank.csv          -> rank,attention          (zero rows excluded)
//!   dilution.csv      -> builders,avg_attention,profit
//!   sweep_summary.csv -> axis_value,replicate,seed,gini,top_1pct,
//!                        top_10pct,median_mean,share_below_100
//!
//! Numbers are written with Rust's default float formatting, which is the
//! shortest decimal that round-trips, so identical runs produce
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::scenario::ScenarioReport;
use crate::harness::sweep::SweepPoint;

/// Output flavor for the metrics bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Validation(format!(
                "unknown format `{other}` (expected csv|json)"
            ))),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

fn fraction_label(fraction: f64) -> String {
    // 0.01 -> "1pct", 0.1 -> "10pct", 0.005 -> "0.5pct"
    format!("{}pct", fraction * 100.0)
}

fn metrics_rows(report: &ScenarioReport) -> Vec<(String, f64)> {
    let m = &report.final_metrics;
    let mut rows = vec![("gini".to_string(), m.gini)];
    for &(f, s) in &m.top_shares {
        rows.push((format!("top_{}", fraction_label(f)), s));
    }
    rows.push(("median_mean".to_string(), m.median_mean));
    for &(t, s) in &m.share_below {
        rows.push((format!("share_below_{t}"), s));
    }
    rows.push(("n".to_string(), m.count as f64));
    rows.push(("total".to_string(), m.total));
    rows.push(("outside_attention".to_string(), report.outside_attention));
    rows
}

/// Write one report's files into `dir`; returns the paths written.
pub fn export_report(
    report: &ScenarioReport,
    format: ExportFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    match format {
        ExportFormat::Csv => {
            let mut out = String::from("name,value\n");
            for (name, value) in metrics_rows(report) {
                out.push_str(&format!("{name},{value}\n"));
            }
            let path = dir.join("metrics.csv");
            write_file(&path, &out)?;
            written.push(path);
        }
        ExportFormat::Json => {
            let path = dir.join("metrics.json");
            let json = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Validation(format!("json serialization: {e}")))?;
            write_file(&path, &json)?;
            written.push(path);
        }
    }

    let mut lorenz = String::from("cum_population,cum_share\n");
    for &(x, y) in &report.lorenz.points {
        lorenz.push_str(&format!("{x},{y}\n"));
    }
    let path = dir.join("lorenz.csv");
    write_file(&path, &lorenz)?;
    written.push(path);

    // rank.csv feeds log-log plots; zero-attention rows would be
    // undefined there and are kept only in final_state.csv.
    let mut rank = String::from("rank,attention\n");
    for &(r, v) in &report.rank.points {
        if v > 0.0 {
            rank.push_str(&format!("{r},{v}\n"));
        }
    }
    let path = dir.join("rank.csv");
    write_file(&path, &rank)?;
    written.push(path);

    let mut state = String::from("builder_id,quality,attention\n");
    for (i, (&q, &x)) in report
        .qualities
        .iter()
        .zip(&report.final_attention)
        .enumerate()
    {
        state.push_str(&format!("{i},{q},{x}\n"));
    }
    let path = dir.join("final_state.csv");
    write_file(&path, &state)?;
    written.push(path);

    if let Some(rows) = &report.dilution {
        let mut out = String::from("builders,avg_attention,profit\n");
        for row in rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.builders, row.average_attention, row.profit
            ));
        }
        let path = dir.join("dilution.csv");
        write_file(&path, &out)?;
        written.push(path);
    }

    Ok(written)
}

fn summary_metric(report: &ScenarioReport, pick: impl Fn(&ScenarioReport) -> Option<f64>) -> f64 {
    pick(report).unwrap_or(f64::NAN)
}

/// Write `sweep_summary.csv` into `dir`.
pub fn export_sweep(points: &[SweepPoint], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut out = String::from(
        "axis_value,replicate,seed,gini,top_1pct,top_10pct,median_mean,share_below_100\n",
    );
    for p in points {
        let (gini, top1, top10, mm, below) = match &p.report {
            None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            Some(r) => (
                r.final_metrics.gini,
                summary_metric(r, |r| {
                    r.final_metrics
                        .top_shares
                        .iter()
                        .find(|(f, _)| *f == 0.01)
                        .map(|&(_, s)| s)
                }),
                summary_metric(r, |r| {
                    r.final_metrics
                        .top_shares
                        .iter()
                        .find(|(f, _)| *f == 0.1)
                        .map(|&(_, s)| s)
                }),
                r.final_metrics.median_mean,
                summary_metric(r, |r| {
                    r.final_metrics
                        .share_below
                        .iter()
                        .find(|(t, _)| *t == 100.0)
                        .map(|&(_, s)| s)
                }),
            ),
        };
        out.push_str(&format!(
            "{},{},{},{gini},{top1},{top10},{mm},{below}\n",
            p.axis_value, p.replicate, p.seed
        ));
    }
    let path = dir.join("sweep_summary.csv");
    write_file(&path, &out)?;
    Ok(path)
}
