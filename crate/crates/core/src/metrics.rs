//! Measurements over simulation results: latency and throughput summaries,
//! trend fits, and CSV/JSONL export.
//!
//! Latencies are reported in seconds, throughputs per second. A metric that
//! has no data (for example read latency in a run where nothing committed)
//! is absent rather than zero.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::netsim::{threshold_rank, BlockStatus, SimResult};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("events span zero time, rates are undefined")]
    ZeroSpan,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

const MICROS: f64 = 1e6;

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn median(values: &mut Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("latencies are finite"));
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { (values[n / 2 - 1] + values[n / 2]) / 2.0 })
}

fn read_latencies_s(result: &SimResult) -> Vec<f64> {
    result
        .reads
        .iter()
        .map(|r| (r.response_micros - r.submit_micros) as f64 / MICROS)
        .collect()
}

/// Mean seconds from a read request to its response. Absent without reads.
pub fn read_latency(result: &SimResult) -> Option<f64> {
    mean(&read_latencies_s(result))
}

/// Reads answered per second of read activity, first request to last
/// response. Zero reads rate as zero; a nonempty zero-width span has no
/// meaningful rate and is an error.
pub fn read_throughput(result: &SimResult) -> Result<f64, MetricsError> {
    if result.reads.is_empty() {
        return Ok(0.0);
    }
    let start = result.reads.iter().map(|r| r.submit_micros).min().unwrap();
    let end = result.reads.iter().map(|r| r.response_micros).max().unwrap();
    if end == start {
        return Err(MetricsError::ZeroSpan);
    }
    Ok(result.reads.len() as f64 / ((end - start) as f64 / MICROS))
}

fn committed_latencies_s(result: &SimResult, threshold: f64) -> Result<Vec<f64>, MetricsError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(MetricsError::InvalidThreshold(threshold));
    }
    let rank = threshold_rank(threshold, result.node_count);
    Ok(result
        .blocks
        .iter()
        .filter(|b| b.status == BlockStatus::Committed)
        .map(|b| {
            let mut commits = b.commit_micros.clone();
            commits.sort_unstable();
            (commits[rank - 1] - b.submit_micros) as f64 / MICROS
        })
        .collect())
}

/// Mean seconds from submission until the given share of nodes committed,
/// over committed blocks. The result keeps every node's commit time, so this
/// can be recomputed at any threshold after the fact.
pub fn transaction_latency(result: &SimResult, threshold: f64) -> Result<Option<f64>, MetricsError> {
    Ok(mean(&committed_latencies_s(result, threshold)?))
}

fn commit_span_micros(result: &SimResult) -> Option<(u64, u64)> {
    let end = result.blocks.iter().flat_map(|b| b.commit_micros.iter().copied()).max()?;
    let start = result.blocks.iter().map(|b| b.submit_micros).min()?;
    Some((start, end))
}

/// Committed transactions per second, first submission to last commit.
/// Zero when nothing committed.
pub fn transaction_throughput(result: &SimResult) -> f64 {
    match commit_span_micros(result) {
        Some((start, end)) if end > start => {
            result.committed_tx() as f64 / ((end - start) as f64 / MICROS)
        }
        _ => 0.0,
    }
}

/// Committed blocks per second over the same span as the transaction rate.
pub fn block_throughput(result: &SimResult) -> f64 {
    match commit_span_micros(result) {
        Some((start, end)) if end > start => {
            result.committed_blocks() as f64 / ((end - start) as f64 / MICROS)
        }
        _ => 0.0,
    }
}

/// Percentage of attempted blocks that committed.
pub fn success_rate(result: &SimResult) -> f64 {
    result.committed_blocks() as f64 / result.block_count as f64 * 100.0
}

/// Coefficient of determination of the least-squares line through the
/// points. Needs two or more points and nonconstant x; a constant-y cloud
/// has no variance to explain, so the fit is absent.
pub fn fit_r2(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (mx, my) = (
        points.iter().map(|p| p.0).sum::<f64>() / n,
        points.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy * sxy) / (sxx * syy))
}

/// One row of a measurement table: the grouping axis, the headline metrics,
/// and optional trend fits stamped across a sweep. Medians and the block
/// rate only appear in JSONL output; the CSV schema is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub group_key: String,
    pub group_value: u64,
    pub read_latency_s: Option<f64>,
    pub read_throughput_rps: Option<f64>,
    pub tx_latency_s: Option<f64>,
    pub tx_throughput_tps: Option<f64>,
    pub success_rate_pct: Option<f64>,
    pub r2_log_fit: Option<f64>,
    pub r2_nlog_fit: Option<f64>,
    pub median_read_latency_s: Option<f64>,
    pub median_tx_latency_s: Option<f64>,
    pub blocks_per_sec: Option<f64>,
}

/// Measure one run at its own network threshold.
pub fn measure(
    result: &SimResult,
    group_key: &str,
    group_value: u64,
) -> Result<MetricReport, MetricsError> {
    let mut tx_lat = committed_latencies_s(result, result.network_threshold)?;
    let mut read_lat = read_latencies_s(result);
    Ok(MetricReport {
        group_key: group_key.to_string(),
        group_value,
        read_latency_s: mean(&read_lat),
        read_throughput_rps: Some(read_throughput(result)?),
        tx_latency_s: mean(&tx_lat),
        tx_throughput_tps: Some(transaction_throughput(result)),
        success_rate_pct: Some(success_rate(result)),
        r2_log_fit: None,
        r2_nlog_fit: None,
        median_read_latency_s: median(&mut read_lat),
        median_tx_latency_s: median(&mut tx_lat),
        blocks_per_sec: Some(block_throughput(result)),
    })
}

/// For a sweep over block counts, fit read latency against ln(n) and
/// transaction latency against n * ln(n), and stamp both fits on every row.
/// Fewer than three usable rows leave the fits absent.
pub fn stamp_block_count_fits(reports: &mut [MetricReport]) {
    let log_points: Vec<(f64, f64)> = reports
        .iter()
        .filter_map(|r| r.read_latency_s.map(|y| ((r.group_value as f64).ln(), y)))
        .collect();
    let nlog_points: Vec<(f64, f64)> = reports
        .iter()
        .filter_map(|r| {
            r.tx_latency_s.map(|y| {
                let n = r.group_value as f64;
                (n * n.ln(), y)
            })
        })
        .collect();
    let r2_log = if log_points.len() >= 3 { fit_r2(&log_points) } else { None };
    let r2_nlog = if nlog_points.len() >= 3 { fit_r2(&nlog_points) } else { None };
    for r in reports.iter_mut() {
        r.r2_log_fit = r2_log;
        r.r2_nlog_fit = r2_nlog;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "jsonl" => Ok(ExportFormat::Jsonl),
            other => Err(format!("unknown value for field format: {other} (want csv or jsonl)")),
        }
    }
}

pub const CSV_HEADER: &str = "group_key,group_value,read_latency_s,read_throughput_rps,tx_latency_s,tx_throughput_tps,success_rate_pct,r2_log_fit,r2_nlog_fit";

fn csv_cell(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.2}"),
        None => String::new(),
    }
}

/// Write reports as CSV (fixed nine-column schema, two decimals, absent
/// metrics as empty cells) or JSONL (full reports, one object per line).
pub fn export(
    reports: &[MetricReport],
    format: ExportFormat,
    mut out: impl Write,
) -> Result<(), MetricsError> {
    match format {
        ExportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in reports {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.group_key,
                    r.group_value,
                    csv_cell(r.read_latency_s),
                    csv_cell(r.read_throughput_rps),
                    csv_cell(r.tx_latency_s),
                    csv_cell(r.tx_throughput_tps),
                    csv_cell(r.success_rate_pct),
                    csv_cell(r.r2_log_fit),
                    csv_cell(r.r2_nlog_fit),
                )?;
            }
        }
        ExportFormat::Jsonl => {
            for r in reports {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}
