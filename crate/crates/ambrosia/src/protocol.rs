//! Sensor-side encoder and server-side decoder state machines, plus the
//! 60-byte framing used for transmission accounting.
//!
//! Both sides run the same forecaster on the same *processed* sequence (true
//! values where sent, predictions where suppressed), so every suppression
//! decision the sensor makes is inferable at the server with no extra
//! signalling. Past bootstrap, the server-side value never deviates from the
//! true value by more than the threshold `delta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{Forecaster, ForecasterKind};
use crate::timeseries::{format_float, TimeSeries};

/// Window/threshold/forecaster configuration shared by both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    #[serde(flatten)]
    pub forecaster: ForecasterKind,
    pub delta: f64,
}

impl ProtocolConfig {
    pub fn new(forecaster: ForecasterKind, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidConfig("delta must be finite and >= 0".into()));
        }
        Ok(Self { forecaster, delta })
    }

    pub fn bootstrap_len(&self) -> usize {
        self.forecaster.bootstrap_len()
    }
}

/// Outcome of one encoder step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    /// Transmit the true value.
    Send(f64),
    /// Suppress; both sides substitute this prediction.
    Suppress(f64),
}

impl Decision {
    pub fn processed_value(&self) -> f64 {
        match *self {
            Decision::Send(v) | Decision::Suppress(v) => v,
        }
    }

    pub fn is_send(&self) -> bool {
        matches!(self, Decision::Send(_))
    }
}

/// Sensor-side state machine.
pub struct EncoderState {
    config: ProtocolConfig,
    forecaster: Box<dyn Forecaster>,
    samples_seen: u64,
    samples_sent: u64,
}

impl EncoderState {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        Ok(Self {
            forecaster: config.forecaster.build()?,
            config,
            samples_seen: 0,
            samples_sent: 0,
        })
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    pub fn samples_sent(&self) -> u64 {
        self.samples_sent
    }

    /// Decides send/suppress for the next true sample.
    ///
    /// The first `bootstrap_len` samples are always sent. Afterwards the
    /// sample is sent only when `|true - predicted| > delta` (strict: a tie
    /// suppresses). The forecaster observes the processed value, never a
    /// suppressed true value.
    pub fn step(&mut self, true_value: f64) -> Result<Decision> {
        if !true_value.is_finite() {
            return Err(Error::NonFiniteInput(self.samples_seen));
        }
        let bootstrap = self.config.bootstrap_len() as u64;
        let decision = if self.samples_seen < bootstrap {
            Decision::Send(true_value)
        } else {
            let predicted = self.forecaster.predict_next()?;
            // A non-finite prediction can never certify the error bound, so
            // the true value is transmitted.
            if !predicted.is_finite() || (true_value - predicted).abs() > self.config.delta {
                Decision::Send(true_value)
            } else {
                Decision::Suppress(predicted)
            }
        };
        self.forecaster.observe(decision.processed_value());
        self.samples_seen += 1;
        if decision.is_send() {
            self.samples_sent += 1;
        }
        Ok(decision)
    }
}

/// Server-side state machine.
pub struct DecoderState {
    config: ProtocolConfig,
    forecaster: Box<dyn Forecaster>,
    reconstructed: Vec<f64>,
}

impl DecoderState {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        Ok(Self {
            forecaster: config.forecaster.build()?,
            config,
            reconstructed: Vec::new(),
        })
    }

    pub fn reconstructed(&self) -> &[f64] {
        &self.reconstructed
    }

    /// Consumes the next slot: a received value, or `None` for a suppressed
    /// sample (in which case the decoder's own prediction is materialized).
    pub fn step(&mut self, received: Option<f64>) -> Result<f64> {
        let bootstrap = self.config.bootstrap_len();
        let value = match received {
            Some(v) => v,
            None => {
                if self.reconstructed.len() < bootstrap {
                    return Err(Error::StreamCorruption(format!(
                        "suppressed slot {} inside bootstrap of {}",
                        self.reconstructed.len(),
                        bootstrap
                    )));
                }
                self.forecaster.predict_next()?
            }
        };
        self.forecaster.observe(value);
        self.reconstructed.push(value);
        Ok(value)
    }
}

/// Per-sample record of a completed session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub index: u64,
    pub true_value: f64,
    pub processed_value: f64,
    pub sent: bool,
}

/// Full per-index account of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionLog {
    pub records: Vec<LogRecord>,
    pub delta: f64,
    pub bootstrap_len: usize,
}

impl TransmissionLog {
    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn samples_sent(&self) -> usize {
        self.records.iter().filter(|r| r.sent).count()
    }

    pub fn data_sent_fraction(&self) -> f64 {
        self.samples_sent() as f64 / self.n() as f64
    }

    pub fn true_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.true_value).collect()
    }

    pub fn processed_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.processed_value).collect()
    }

    /// `index,true,processed,sent` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,true,processed,sent\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.index,
                format_float(r.true_value),
                format_float(r.processed_value),
                r.sent as u8
            ));
        }
        out
    }
}

/// Drives encoder and decoder in lockstep over a whole series and checks the
/// sync invariant (decoder reconstruction bit-identical to the encoder's
/// processed sequence) at every index.
pub fn run_session(series: &TimeSeries, config: &ProtocolConfig) -> Result<TransmissionLog> {
    let bootstrap = config.bootstrap_len();
    if series.len() <= bootstrap {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            bootstrap,
        });
    }
    let mut encoder = EncoderState::new(*config)?;
    let mut decoder = DecoderState::new(*config)?;
    let mut records = Vec::with_capacity(series.len());
    for sample in series.samples() {
        let decision = encoder.step(sample.value)?;
        let received = match decision {
            Decision::Send(v) => Some(v),
            Decision::Suppress(_) => None,
        };
        let reconstructed = decoder.step(received)?;
        if reconstructed.to_bits() != decision.processed_value().to_bits() {
            return Err(Error::StreamCorruption(format!(
                "sync violation at index {}: encoder {} vs decoder {}",
                sample.index,
                decision.processed_value(),
                reconstructed
            )));
        }
        records.push(LogRecord {
            index: sample.index,
            true_value: sample.value,
            processed_value: reconstructed,
            sent: decision.is_send(),
        });
    }
    Ok(TransmissionLog {
        records,
        delta: config.delta,
        bootstrap_len: bootstrap,
    })
}

/// Bytes per (u32 index, f64 value) pair on the wire.
pub const PAIR_BYTES: usize = 12;
/// 60-byte chunks hold five pairs.
pub const FRAME_CAPACITY: usize = 5;

/// One transmission chunk: up to five (index, value) pairs, indices strictly
/// increasing. Serialized as a 1-byte pair count followed by little-endian
/// pairs; a zero-count frame marks end of batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub pairs: Vec<(u32, f64)>,
}

impl Frame {
    pub fn payload_bytes(&self) -> usize {
        self.pairs.len() * PAIR_BYTES
    }
}

/// Byte accounting for a framed session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSummary {
    pub total_frames: usize,
    /// Pair payload actually transmitted.
    pub payload_bytes: usize,
    /// Pair payload had every sample been transmitted.
    pub bytes_at_full_transmission: usize,
}

impl FrameSummary {
    pub fn byte_fraction(&self) -> f64 {
        if self.bytes_at_full_transmission == 0 {
            0.0
        } else {
            self.payload_bytes as f64 / self.bytes_at_full_transmission as f64
        }
    }
}

/// Packs the sent samples of a session five-per-frame in index order.
pub fn frame_stream(log: &TransmissionLog) -> (Vec<Frame>, FrameSummary) {
    let mut frames = Vec::new();
    let mut pairs = Vec::with_capacity(FRAME_CAPACITY);
    for r in log.records.iter().filter(|r| r.sent) {
        pairs.push((r.index as u32, r.true_value));
        if pairs.len() == FRAME_CAPACITY {
            frames.push(Frame {
                pairs: std::mem::take(&mut pairs),
            });
            pairs = Vec::with_capacity(FRAME_CAPACITY);
        }
    }
    if !pairs.is_empty() {
        frames.push(Frame { pairs });
    }
    let payload_bytes: usize = frames.iter().map(Frame::payload_bytes).sum();
    let summary = FrameSummary {
        total_frames: frames.len(),
        payload_bytes,
        bytes_at_full_transmission: log.n() * PAIR_BYTES,
    };
    (frames, summary)
}

/// Serializes frames, terminated by a zero-count marker frame.
pub fn encode_frames(frames: &[Frame]) -> Vec<u8> {
    let mut out = Vec::new();
    for f in frames {
        out.push(f.pairs.len() as u8);
        for &(idx, val) in &f.pairs {
            out.extend_from_slice(&idx.to_le_bytes());
            out.extend_from_slice(&val.to_le_bytes());
        }
    }
    out.push(0); // end-of-batch marker flushes trailing suppressions
    out
}

pub fn decode_frames(bytes: &[u8]) -> Result<Vec<Frame>> {
    let mut frames = Vec::new();
    let mut pos = 0;
    loop {
        let count = *bytes
            .get(pos)
            .ok_or_else(|| Error::StreamCorruption("missing end-of-batch marker".into()))?
            as usize;
        pos += 1;
        if count == 0 {
            break;
        }
        if count > FRAME_CAPACITY {
            return Err(Error::StreamCorruption(format!(
                "frame pair count {count} exceeds capacity {FRAME_CAPACITY}"
            )));
        }
        let mut pairs = Vec::with_capacity(count);
        for _ in 0..count {
            let idx_bytes = bytes
                .get(pos..pos + 4)
                .ok_or_else(|| Error::StreamCorruption("truncated pair index".into()))?;
            let val_bytes = bytes
                .get(pos + 4..pos + PAIR_BYTES)
                .ok_or_else(|| Error::StreamCorruption("truncated pair value".into()))?;
            pairs.push((
                u32::from_le_bytes(idx_bytes.try_into().unwrap()),
                f64::from_le_bytes(val_bytes.try_into().unwrap()),
            ));
            pos += PAIR_BYTES;
        }
        frames.push(Frame { pairs });
    }
    Ok(frames)
}

/// Expands frames back into per-index decoder input: `Some(value)` at sent
/// indices, `None` in the gaps (suppressed samples). `total_len` bounds the
/// stream; trailing suppressions are implied by the end-of-batch marker.
pub fn frames_to_decisions(frames: &[Frame], total_len: usize) -> Result<Vec<Option<f64>>> {
    let mut out = vec![None; total_len];
    let mut last: Option<u32> = None;
    for f in frames {
        for &(idx, val) in &f.pairs {
            if let Some(prev) = last {
                if idx <= prev {
                    return Err(Error::StreamCorruption(format!(
                        "non-increasing frame index {idx} after {prev}"
                    )));
                }
            }
            let slot = out.get_mut(idx as usize).ok_or_else(|| {
                Error::StreamCorruption(format!("frame index {idx} beyond stream length"))
            })?;
            *slot = Some(val);
            last = Some(idx);
        }
    }
    Ok(out)
}
