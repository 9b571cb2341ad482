//! Stream types, CSV ingestion, and seeded synthetic signal generation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One timestamped scalar reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub index: u64,
    /// Seconds. Derived from `index * sample_period` when the source had none.
    pub timestamp: f64,
    pub value: f64,
}

/// An ordered, contiguous scalar stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<Sample>,
    sample_period: f64,
}

impl TimeSeries {
    pub fn from_values(values: &[f64], sample_period: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(sample_period > 0.0) {
            return Err(Error::InvalidConfig("sample_period must be > 0".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    line: i,
                    raw: v.to_string(),
                });
            }
        }
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, &value)| Sample {
                index: i as u64,
                timestamp: i as f64 * sample_period,
                value,
            })
            .collect();
        Ok(Self {
            samples,
            sample_period,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// Checks the structural invariants: contiguous indices from 0, finite values.
    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.index != i as u64 {
                return Err(Error::StreamCorruption(format!(
                    "index {} at position {}",
                    s.index, i
                )));
            }
            if !s.value.is_finite() {
                return Err(Error::NonFiniteValue {
                    line: i,
                    raw: s.value.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Reads a `timestamp,value` or `index,value` CSV with a header row.
    ///
    /// `value_column` selects the value column by name. The sample period is
    /// inferred from a `timestamp` column when present, else 1.0 s.
    pub fn load_csv(path: &Path, value_column: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{}: {e}", path.display()),
            )),
            _ => Error::Csv(e),
        })?;
        let headers = reader.headers()?.clone();
        let value_idx = headers
            .iter()
            .position(|h| h == value_column)
            .ok_or_else(|| Error::MissingColumn(value_column.to_string()))?;
        let ts_idx = headers.iter().position(|h| h == "timestamp");

        let mut values = Vec::new();
        let mut timestamps = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let line = row + 2; // 1-based, after the header
            let record = record?;
            let raw = record.get(value_idx).ok_or_else(|| Error::CsvParse {
                line,
                msg: "missing value field".into(),
            })?;
            let value: f64 = raw.trim().parse().map_err(|e| Error::CsvParse {
                line,
                msg: format!("{e}: {raw:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    line,
                    raw: raw.to_string(),
                });
            }
            values.push(value);
            if let Some(ti) = ts_idx {
                let raw_ts = record.get(ti).unwrap_or("");
                let ts: f64 = raw_ts.trim().parse().map_err(|e| Error::CsvParse {
                    line,
                    msg: format!("{e}: {raw_ts:?}"),
                })?;
                timestamps.push(ts);
            }
        }
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        let period = if timestamps.len() >= 2 {
            let dt = timestamps[1] - timestamps[0];
            if dt > 0.0 {
                dt
            } else {
                1.0
            }
        } else {
            1.0
        };
        TimeSeries::from_values(&values, period)
    }

    /// Writes `index,timestamp,value` CSV. Values round-trip bit-exactly
    /// through [`TimeSeries::load_csv`] (Ryu shortest representation).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["index", "timestamp", "value"])?;
        for s in &self.samples {
            w.write_record([
                s.index.to_string(),
                format_float(s.timestamp),
                format_float(s.value),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest decimal form that parses back to the identical f64.
pub fn format_float(v: f64) -> String {
    let mut buf = ryu_format(v);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // f64 Display in Rust is already round-trip shortest.
    format!("{v}")
}

/// Signal family for synthetic generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    Constant { value: f64 },
    Linear { slope: f64, intercept: f64 },
    Sinusoid { amplitude: f64, period: f64 },
    Ar1 { coeff: f64 },
    RandomWalk { step_std: f64 },
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalKind::Constant { value } => write!(f, "constant:{value}"),
            SignalKind::Linear { slope, intercept } => write!(f, "linear:{slope},{intercept}"),
            SignalKind::Sinusoid { amplitude, period } => {
                write!(f, "sinusoid:{amplitude},{period}")
            }
            SignalKind::Ar1 { coeff } => write!(f, "ar1:{coeff}"),
            SignalKind::RandomWalk { step_std } => write!(f, "random_walk:{step_std}"),
        }
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    /// Parses `constant:V`, `linear:SLOPE,INTERCEPT`, `sinusoid:AMP,PERIOD`,
    /// `ar1:COEFF`, `random_walk:STEP_STD`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, a),
            None => (s, ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidConfig(format!("bad signal arg {a:?}: {e}")))
                })
                .collect::<Result<_>>()?
        };
        let arg = |i: usize, default: f64| nums.get(i).copied().unwrap_or(default);
        match name {
            "constant" => Ok(SignalKind::Constant { value: arg(0, 0.0) }),
            "linear" => Ok(SignalKind::Linear {
                slope: arg(0, 1.0),
                intercept: arg(1, 0.0),
            }),
            "sinusoid" => Ok(SignalKind::Sinusoid {
                amplitude: arg(0, 1.0),
                period: arg(1, 50.0),
            }),
            "ar1" => Ok(SignalKind::Ar1 { coeff: arg(0, 0.8) }),
            "random_walk" => Ok(SignalKind::RandomWalk {
                step_std: arg(0, 1.0),
            }),
            other => Err(Error::InvalidConfig(format!(
                "unknown signal kind {other:?}; valid: constant, linear, sinusoid, ar1, random_walk"
            ))),
        }
    }
}

/// Deterministic synthetic series recipe. Identical spec + seed produce
/// bit-identical output on every platform (ChaCha8 generator).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(flatten)]
    pub kind: SignalKind,
    pub length: usize,
    pub noise_std: f64,
    /// Additive spikes: (index, magnitude).
    pub anomalies: Vec<(usize, f64)>,
    pub seed: u64,
    pub sample_period: f64,
}

impl SyntheticSpec {
    pub fn new(kind: SignalKind, length: usize, noise_std: f64, seed: u64) -> Self {
        Self {
            kind,
            length,
            noise_std,
            anomalies: Vec::new(),
            seed,
            sample_period: 1.0,
        }
    }

    pub fn with_anomalies(mut self, anomalies: Vec<(usize, f64)>) -> Self {
        self.anomalies = anomalies;
        self
    }

    pub fn generate(&self) -> Result<TimeSeries> {
        if self.length == 0 {
            return Err(Error::EmptySeries);
        }
        for &(idx, _) in &self.anomalies {
            if idx >= self.length {
                return Err(Error::AnomalyIndexOutOfRange {
                    index: idx,
                    len: self.length,
                });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut values = Vec::with_capacity(self.length);
        let mut walk = 0.0_f64;
        let mut ar_prev = 0.0_f64;
        for i in 0..self.length {
            let base = match self.kind {
                SignalKind::Constant { value } => value,
                SignalKind::Linear { slope, intercept } => intercept + slope * i as f64,
                SignalKind::Sinusoid { amplitude, period } => {
                    amplitude * (2.0 * std::f64::consts::PI * i as f64 / period).sin()
                }
                SignalKind::Ar1 { coeff } => {
                    let innov = standard_normal(&mut rng);
                    ar_prev = coeff * ar_prev + innov;
                    ar_prev
                }
                SignalKind::RandomWalk { step_std } => {
                    walk += step_std * standard_normal(&mut rng);
                    walk
                }
            };
            let noise = if self.noise_std > 0.0 {
                self.noise_std * standard_normal(&mut rng)
            } else {
                0.0
            };
            values.push(base + noise);
        }
        for &(idx, mag) in &self.anomalies {
            values[idx] += mag;
        }
        TimeSeries::from_values(&values, self.sample_period)
    }
}

/// Box-Muller on ChaCha8 draws; fixed transform keeps golden files portable
/// across rand/rand_distr versions.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        if u1 > 0.0 {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}
