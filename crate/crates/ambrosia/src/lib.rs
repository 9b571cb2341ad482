//! Dual-prediction data reduction for sensor streams.
//!
//! A sensor and a server run the same one-step forecaster. A sample is
//! transmitted only when the sensor's prediction error exceeds a threshold
//! `delta`; otherwise both sides substitute the prediction, so the server's
//! reconstruction never deviates from the true stream by more than `delta`
//! past bootstrap.
//!
//! The crate bundles the protocol itself plus the analysis tooling around it:
//!
//! - [`timeseries`]: stream types, CSV ingestion, seeded synthetic signals
//! - [`forecast`]: window-based and autoregressive one-step forecasters
//! - [`protocol`]: encoder/decoder state machines and 60-byte framing
//! - [`metrics`]: data-sent percentage, MSE/NMSE, threshold sweeps
//! - [`anomaly`]: streaming random cut forest (CoDisp) scoring
//! - [`displacement`]: double integration of acceleration streams
//! - [`energy`]: radio power profiles and battery-lifetime model
//! - [`manifest`]: reproducibility manifests for CLI runs

pub mod anomaly;
pub mod displacement;
pub mod energy;
pub mod error;
pub mod forecast;
pub mod manifest;
pub mod metrics;
pub mod protocol;
pub mod timeseries;

pub use error::{Error, Result};
pub use forecast::{ArForecaster, Forecaster, ForecasterKind, WindowForecaster};
pub use metrics::SessionMetrics;
pub use protocol::{run_session, ProtocolConfig, TransmissionLog};
pub use timeseries::{Sample, SignalKind, SyntheticSpec, TimeSeries};
