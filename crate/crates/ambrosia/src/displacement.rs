//! Displacement from acceleration by trapezoidal double integration, and the
//! comparison of true vs processed displacement curves.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::compute_metrics;
use crate::protocol::{run_session, ProtocolConfig};
use crate::timeseries::TimeSeries;

/// Per-index velocity and displacement sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicState {
    pub velocity: Vec<f64>,
    pub displacement: Vec<f64>,
}

/// Trapezoidal rule applied twice:
/// `v[i] = v[i-1] + dt*(a[i-1]+a[i])/2`, `s[i] = s[i-1] + dt*(v[i-1]+v[i])/2`.
pub fn double_integrate(accel: &TimeSeries, v0: f64, s0: f64) -> Result<KinematicState> {
    if accel.is_empty() {
        return Err(Error::EmptySeries);
    }
    let dt = accel.sample_period();
    let a = accel.values();
    let mut velocity = Vec::with_capacity(a.len());
    let mut displacement = Vec::with_capacity(a.len());
    velocity.push(v0);
    displacement.push(s0);
    for i in 1..a.len() {
        let v = velocity[i - 1] + dt * (a[i - 1] + a[i]) / 2.0;
        velocity.push(v);
        displacement.push(displacement[i - 1] + dt * (velocity[i - 1] + v) / 2.0);
    }
    Ok(KinematicState {
        velocity,
        displacement,
    })
}

/// Displacement impact of one protocol run at a given threshold.
#[derive(Debug, Clone, Serialize)]
pub struct DisplacementImpact {
    pub delta: f64,
    pub data_sent_pct: f64,
    /// Raw MSE between displacement curves, in m^2 (unit-bearing by design;
    /// the signal-level NMSE convention does not apply here).
    pub mse_displacement: f64,
    pub displacement_true: Vec<f64>,
    pub displacement_processed: Vec<f64>,
}

/// Runs the protocol on an acceleration stream and double-integrates both the
/// true and the processed sequences.
pub fn displacement_impact(
    accel: &TimeSeries,
    config: &ProtocolConfig,
) -> Result<DisplacementImpact> {
    let log = run_session(accel, config)?;
    let metrics = compute_metrics(&log)?;
    let dt = accel.sample_period();
    let truth = double_integrate(accel, 0.0, 0.0)?;
    let processed_series = TimeSeries::from_values(&log.processed_values(), dt)?;
    let processed = double_integrate(&processed_series, 0.0, 0.0)?;
    let n = truth.displacement.len();
    let mse_displacement = truth
        .displacement
        .iter()
        .zip(&processed.displacement)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n as f64;
    Ok(DisplacementImpact {
        delta: config.delta,
        data_sent_pct: metrics.data_sent_pct,
        mse_displacement,
        displacement_true: truth.displacement,
        displacement_processed: processed.displacement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::ForecasterKind;
    use crate::timeseries::{SignalKind, SyntheticSpec};
    use proptest::prelude::*;

    #[test]
    fn zero_acceleration_stays_at_rest() {
        let accel = TimeSeries::from_values(&[0.0; 10], 1.0).unwrap();
        let k = double_integrate(&accel, 0.0, 0.0).unwrap();
        assert!(k.displacement.iter().all(|&s| s == 0.0));
        assert!(k.velocity.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_acceleration_closed_form() {
        // a = 2 m/s^2, dt = 1 s: s(t) = a t^2 / 2, exact under trapezoid.
        let accel = TimeSeries::from_values(&[2.0; 5], 1.0).unwrap();
        let k = double_integrate(&accel, 0.0, 0.0).unwrap();
        assert_eq!(k.displacement[2], 4.0);
        for (i, &s) in k.displacement.iter().enumerate() {
            let t = i as f64;
            assert!((s - t * t).abs() < 1e-12, "t={t}: {s}");
        }
    }

    #[test]
    fn matches_cumulative_sum_reference() {
        let accel = SyntheticSpec::new(
            SignalKind::Sinusoid {
                amplitude: 1.0,
                period: 30.0,
            },
            300,
            0.3,
            13,
        )
        .generate()
        .unwrap();
        let k = double_integrate(&accel, 0.0, 0.0).unwrap();
        // independent reference: explicit running sums
        let a = accel.values();
        let dt = accel.sample_period();
        let mut v = 0.0;
        let mut s = 0.0;
        for i in 1..a.len() {
            let v_next = v + dt * (a[i - 1] + a[i]) / 2.0;
            s += dt * (v + v_next) / 2.0;
            v = v_next;
            let rel = (k.displacement[i] - s).abs() / (1.0 + s.abs());
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn empty_series_rejected() {
        // TimeSeries cannot be empty, so exercise the guard directly.
        let accel = TimeSeries::from_values(&[1.0], 1.0).unwrap();
        assert!(double_integrate(&accel, 0.0, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn integration_is_linear(
            a1 in proptest::collection::vec(-5.0f64..5.0, 20),
            a2 in proptest::collection::vec(-5.0f64..5.0, 20),
        ) {
            let s1 = double_integrate(&TimeSeries::from_values(&a1, 1.0).unwrap(), 0.0, 0.0).unwrap();
            let s2 = double_integrate(&TimeSeries::from_values(&a2, 1.0).unwrap(), 0.0, 0.0).unwrap();
            let sum: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| x + y).collect();
            let s12 = double_integrate(&TimeSeries::from_values(&sum, 1.0).unwrap(), 0.0, 0.0).unwrap();
            for i in 0..20 {
                let want = s1.displacement[i] + s2.displacement[i];
                prop_assert!((s12.displacement[i] - want).abs() <= 1e-12 * (1.0 + want.abs()));
            }
        }

        #[test]
        fn zero_prefix_shifts_curve(
            tail in proptest::collection::vec(-5.0f64..5.0, 14),
            k in 1usize..6,
        ) {
            // a[0] = 0 so the trapezoid across the padding boundary is zero
            // and the shift is exact.
            let mut a = vec![0.0];
            a.extend_from_slice(&tail);
            let base = double_integrate(&TimeSeries::from_values(&a, 1.0).unwrap(), 0.0, 0.0).unwrap();
            let mut padded = vec![0.0; k];
            padded.extend_from_slice(&a);
            let shifted = double_integrate(&TimeSeries::from_values(&padded, 1.0).unwrap(), 0.0, 0.0).unwrap();
            for i in 0..a.len() {
                prop_assert_eq!(shifted.displacement[i + k], base.displacement[i]);
            }
        }
    }

    #[test]
    fn linear_ramp_accel_has_zero_impact() {
        let values: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let accel = TimeSeries::from_values(&values, 1.0).unwrap();
        let config = ProtocolConfig::new(ForecasterKind::window(4), 0.5).unwrap();
        let impact = displacement_impact(&accel, &config).unwrap();
        assert_eq!(impact.mse_displacement, 0.0);
    }

    #[test]
    fn delta_zero_has_zero_impact() {
        let accel = SyntheticSpec::new(SignalKind::RandomWalk { step_std: 0.5 }, 100, 0.0, 5)
            .generate()
            .unwrap();
        let config = ProtocolConfig::new(ForecasterKind::window(4), 0.0).unwrap();
        let impact = displacement_impact(&accel, &config).unwrap();
        assert_eq!(impact.mse_displacement, 0.0);
        assert_eq!(impact.data_sent_pct, 100.0);
    }
}
