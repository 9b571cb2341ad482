//! Session quantification: data-sent percentage, MSE, normalized MSE, and
//! threshold sweep tables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{run_session, ProtocolConfig, TransmissionLog};
use crate::timeseries::{format_float, TimeSeries};

/// Summary statistics of one protocol session.
///
/// `nmse` is MSE divided by the population variance of the true series and is
/// absent when that variance is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SessionMetrics {
    pub n: usize,
    pub samples_sent: usize,
    pub data_sent_pct: f64,
    pub mse: f64,
    pub nmse: Option<f64>,
    /// Maximum absolute error over post-bootstrap indices.
    pub max_abs_error: f64,
}

pub fn compute_metrics(log: &TransmissionLog) -> Result<SessionMetrics> {
    let n = log.n();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let true_vals = log.true_values();
    let processed = log.processed_values();
    let mse = true_vals
        .iter()
        .zip(&processed)
        .map(|(t, p)| (t - p) * (t - p))
        .sum::<f64>()
        / n as f64;
    let mean = true_vals.iter().sum::<f64>() / n as f64;
    let variance = true_vals.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n as f64;
    let nmse = if variance > 0.0 { Some(mse / variance) } else { None };
    let max_abs_error = true_vals
        .iter()
        .zip(&processed)
        .skip(log.bootstrap_len)
        .map(|(t, p)| (t - p).abs())
        .fold(0.0_f64, f64::max);
    Ok(SessionMetrics {
        n,
        samples_sent: log.samples_sent(),
        data_sent_pct: 100.0 * log.samples_sent() as f64 / n as f64,
        mse,
        nmse,
        max_abs_error,
    })
}

/// One row of a threshold sweep: metrics per forecaster at a fixed delta.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub cells: Vec<SweepCell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub forecaster: String,
    pub metrics: SessionMetrics,
}

/// Runs one full session per (delta, config) combination. Deltas must be
/// ascending.
pub fn sweep(
    series: &TimeSeries,
    deltas: &[f64],
    configs: &[ProtocolConfig],
) -> Result<Vec<SweepRow>> {
    if deltas.is_empty() {
        return Err(Error::InvalidConfig("deltas must be non-empty".into()));
    }
    if deltas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("deltas must be ascending".into()));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mut cells = Vec::with_capacity(configs.len());
        for base in configs {
            let config = ProtocolConfig::new(base.forecaster, delta)?;
            let log = run_session(series, &config)?;
            cells.push(SweepCell {
                forecaster: base.forecaster.label().to_string(),
                metrics: compute_metrics(&log)?,
            });
        }
        rows.push(SweepRow { delta, cells });
    }
    Ok(rows)
}

/// `delta,forecaster,data_sent_pct,mse,nmse,max_abs_error` CSV.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("delta,forecaster,data_sent_pct,mse,nmse,max_abs_error\n");
    for row in rows {
        for cell in &row.cells {
            let m = &cell.metrics;
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                format_float(row.delta),
                cell.forecaster,
                format_float(m.data_sent_pct),
                format_float(m.mse),
                m.nmse.map(format_float).unwrap_or_default(),
                format_float(m.max_abs_error),
            ));
        }
    }
    out
}
