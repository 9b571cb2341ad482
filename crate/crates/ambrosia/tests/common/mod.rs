//! Pinned datasets and process helpers shared by the integration tests.
//!
//! The datasets are fixed (signal recipe + seed) so that table values, peak
//! sets, and golden files stay byte-stable across runs and platforms.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ambrosia::anomaly::ForestConfig;
use ambrosia::timeseries::{SignalKind, SyntheticSpec, TimeSeries};

/// Dataset for the window-vs-AR parity table: an AR(1) stream whose
/// short-range correlation both schemes track comparably.
pub fn parity_spec() -> SyntheticSpec {
    SyntheticSpec::new(SignalKind::Ar1 { coeff: 0.8 }, 200, 0.1, 42)
}

pub fn parity_series() -> TimeSeries {
    parity_spec().generate().unwrap()
}

/// Window size paired with the parity dataset.
pub const PARITY_WINDOW: usize = 3;

/// AR order / fit window paired with the parity dataset.
pub const PARITY_AR_ORDER: usize = 3;
pub const PARITY_FIT_WINDOW: usize = 50;

/// Dataset for peak preservation: a sinusoid with three injected spikes.
pub fn spiked_spec() -> SyntheticSpec {
    SyntheticSpec::new(
        SignalKind::Sinusoid {
            amplitude: 2.0,
            period: 50.0,
        },
        400,
        0.1,
        42,
    )
    .with_anomalies(vec![(120, 10.0), (260, -10.0), (340, 10.0)])
}

pub fn spiked_series() -> TimeSeries {
    spiked_spec().generate().unwrap()
}

pub const SPIKE_INDICES: [usize; 3] = [120, 260, 340];
pub const SPIKED_WINDOW: usize = 5;
pub const PEAK_TAU: f64 = 25.0;

pub fn spiked_forest_config() -> ForestConfig {
    ForestConfig {
        num_trees: 40,
        tree_capacity: 256,
        shingle: 4,
        seed: 7,
    }
}

/// Dataset for displacement impact: sinusoidal acceleration with noise.
pub fn accel_spec() -> SyntheticSpec {
    SyntheticSpec::new(
        SignalKind::Sinusoid {
            amplitude: 1.0,
            period: 40.0,
        },
        300,
        0.1,
        9,
    )
}

pub fn accel_series() -> TimeSeries {
    accel_spec().generate().unwrap()
}

pub const ACCEL_WINDOW: usize = 5;
pub const ACCEL_DELTAS: [f64; 3] = [0.3, 0.5, 1.0];

/// Path to the compiled `ambrosia` binary.
pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ambrosia")
}

/// Directory holding the checked-in golden outputs.
pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs the binary in `dir` with a scrubbed output-dir environment.
pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("AMBROSIA_OUT_DIR")
        .output()
        .expect("spawn ambrosia")
}

/// Asserts success and returns stdout as a string.
pub fn run_ok(dir: &Path, args: &[&str]) -> String {
    let out = run_in(dir, args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}
