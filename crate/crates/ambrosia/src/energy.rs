//! Battery-lifetime model: translates the data-sent fraction of a session
//! into device lifetime per wireless technology.
//!
//! Two-state model: the node transmits for `t_tx` seconds per transmission
//! interval and sleeps for the rest. Reception is the gateway's burden, so
//! `p_rx`/`p_idle` are carried for reference but do not enter the lifetime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{frame_stream, TransmissionLog};

pub const SECONDS_PER_YEAR: f64 = 3.156e7;

/// Per-technology power constants plus the transmit data rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioProfile {
    pub name: String,
    pub p_tx_mw: f64,
    pub p_rx_mw: f64,
    /// Absent for the long-range technologies.
    pub p_idle_mw: Option<f64>,
    pub p_sleep_uw: f64,
    /// Effective transmit rate, bytes per second.
    pub data_rate_bps: f64,
}

impl RadioProfile {
    fn new(
        name: &str,
        p_tx_mw: f64,
        p_rx_mw: f64,
        p_idle_mw: Option<f64>,
        p_sleep_uw: f64,
        data_rate_bps: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            p_tx_mw,
            p_rx_mw,
            p_idle_mw,
            p_sleep_uw,
            data_rate_bps,
        }
    }

    pub fn p_tx_watts(&self) -> f64 {
        self.p_tx_mw * 1e-3
    }

    pub fn p_sleep_watts(&self) -> f64 {
        self.p_sleep_uw * 1e-6
    }
}

/// The five built-in technology rows. Power constants are fixed; the LoRa
/// rate follows the deployment's ~1 kB/s, the BLE rate is calibrated to the
/// 29.18-year low-traffic anchor, and the remaining rates are nominal
/// figures for each technology. All are overridable.
pub fn builtin_profiles() -> Vec<RadioProfile> {
    vec![
        RadioProfile::new("802.11psm", 699.6, 170.0, Some(66.0), 13.2, 125_000.0),
        RadioProfile::new("ble", 37.2, 42.3, Some(13.2), 7.8, 1_500.0),
        RadioProfile::new("802.15.4", 24.11, 20.87, Some(4.67), 4.32, 31_250.0),
        RadioProfile::new("lora", 419.6, 44.06, None, 4.32, 1_000.0),
        RadioProfile::new("sigfox", 147.0, 39.0, None, 4.32, 12.5),
    ]
}

pub fn profile_by_name(name: &str) -> Result<RadioProfile> {
    let profiles = builtin_profiles();
    profiles
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| Error::UnknownTech {
            name: name.to_string(),
            valid: profiles
                .iter()
                .map(|p| p.name.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Traffic parameters feeding the lifetime model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficModel {
    /// Transmission interval, seconds.
    pub ti: f64,
    /// Bytes per interval at 100% transmission.
    pub payload_full_bytes: f64,
    /// Fraction of the full payload actually transmitted, in [0, 1].
    pub data_fraction: f64,
    /// Battery energy, joules.
    pub battery_joules: f64,
    /// Fixed per-transmission radio overhead, bytes (preamble, headers).
    pub overhead_bytes: f64,
}

impl TrafficModel {
    pub fn new(ti: f64, data_fraction: f64) -> Result<Self> {
        let m = Self {
            ti,
            payload_full_bytes: 1000.0,
            data_fraction,
            battery_joules: 13_500.0,
            overhead_bytes: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ti > 0.0) {
            return Err(Error::InvalidConfig("ti must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.data_fraction) {
            return Err(Error::InvalidConfig(
                "data_fraction must be in [0, 1]".into(),
            ));
        }
        if !(self.battery_joules > 0.0) || self.payload_full_bytes < 0.0 || self.overhead_bytes < 0.0
        {
            return Err(Error::InvalidConfig("non-positive energy model input".into()));
        }
        Ok(())
    }
}

/// Device lifetime in years under the two-state transmit/sleep model.
pub fn lifetime_years(profile: &RadioProfile, traffic: &TrafficModel) -> Result<f64> {
    traffic.validate()?;
    let bytes = traffic.data_fraction * traffic.payload_full_bytes
        + if traffic.data_fraction > 0.0 {
            traffic.overhead_bytes
        } else {
            0.0
        };
    let t_tx = bytes / profile.data_rate_bps;
    if t_tx > traffic.ti {
        return Err(Error::ChannelSaturated {
            t_tx,
            ti: traffic.ti,
        });
    }
    let duty = t_tx / traffic.ti;
    let avg_power = profile.p_tx_watts() * duty + profile.p_sleep_watts() * (1.0 - duty);
    Ok(traffic.battery_joules / avg_power / SECONDS_PER_YEAR)
}

/// One (fraction, years) table row for lifetime curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimePoint {
    pub fraction: f64,
    pub years: f64,
}

/// Lifetime as a function of data fraction at a fixed transmission interval.
pub fn lifetime_curve(
    profile: &RadioProfile,
    ti: f64,
    fractions: &[f64],
) -> Result<Vec<LifetimePoint>> {
    fractions
        .iter()
        .map(|&fraction| {
            let traffic = TrafficModel::new(ti, fraction)?;
            Ok(LifetimePoint {
                fraction,
                years: lifetime_years(profile, &traffic)?,
            })
        })
        .collect()
}

/// Lifetime comparison for a completed session: baseline (all samples
/// transmitted) vs the session's measured byte fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SessionLifetime {
    pub data_fraction: f64,
    pub baseline_years: f64,
    pub reduced_years: f64,
    pub gain_pct: f64,
}

pub fn session_lifetime(
    log: &TransmissionLog,
    profile: &RadioProfile,
    ti: f64,
) -> Result<SessionLifetime> {
    let (_, summary) = frame_stream(log);
    let data_fraction = summary.byte_fraction();
    let baseline_years = lifetime_years(profile, &TrafficModel::new(ti, 1.0)?)?;
    let reduced_years = lifetime_years(profile, &TrafficModel::new(ti, data_fraction)?)?;
    Ok(SessionLifetime {
        data_fraction,
        baseline_years,
        reduced_years,
        gain_pct: 100.0 * (reduced_years - baseline_years) / baseline_years,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::ForecasterKind;
    use crate::protocol::{run_session, ProtocolConfig};
    use crate::timeseries::{SignalKind, SyntheticSpec};

    #[test]
    fn builtin_table_matches_expected_constants() {
        let rows = builtin_profiles();
        let expect = [
            ("802.11psm", 699.6, 170.0, Some(66.0), 13.2),
            ("ble", 37.2, 42.3, Some(13.2), 7.8),
            ("802.15.4", 24.11, 20.87, Some(4.67), 4.32),
            ("lora", 419.6, 44.06, None, 4.32),
            ("sigfox", 147.0, 39.0, None, 4.32),
        ];
        assert_eq!(rows.len(), expect.len());
        for (row, (name, tx, rx, idle, sleep)) in rows.iter().zip(expect) {
            assert_eq!(row.name, name);
            assert_eq!(row.p_tx_mw, tx);
            assert_eq!(row.p_rx_mw, rx);
            assert_eq!(row.p_idle_mw, idle);
            assert_eq!(row.p_sleep_uw, sleep);
        }
    }

    #[test]
    fn zero_fraction_is_pure_sleep() {
        for profile in builtin_profiles() {
            let years = lifetime_years(&profile, &TrafficModel::new(3600.0, 0.0).unwrap()).unwrap();
            let expect = 13_500.0 / profile.p_sleep_watts() / SECONDS_PER_YEAR;
            assert!((years - expect).abs() < 1e-9 * expect);
        }
        // BLE: 13500 J / 7.8 uW ~ 54.9 years
        let ble = profile_by_name("ble").unwrap();
        let years = lifetime_years(&ble, &TrafficModel::new(3600.0, 0.0).unwrap()).unwrap();
        assert!((years - 54.85).abs() < 0.1, "{years}");
    }

    #[test]
    fn lora_low_traffic_anchor() {
        let lora = profile_by_name("lora").unwrap();
        let full = lifetime_years(&lora, &TrafficModel::new(3600.0, 1.0).unwrap()).unwrap();
        assert!((full - 3.54).abs() < 0.02, "{full}");
        let half = lifetime_years(&lora, &TrafficModel::new(3600.0, 0.5).unwrap()).unwrap();
        assert!((half - 6.83).abs() < 0.05, "{half}");
    }

    #[test]
    fn ble_low_traffic_anchor() {
        let ble = profile_by_name("ble").unwrap();
        let full = lifetime_years(&ble, &TrafficModel::new(3600.0, 1.0).unwrap()).unwrap();
        assert!((full - 29.18).abs() / 29.18 < 0.10, "{full}");
    }

    #[test]
    fn battery_scales_lifetime_linearly() {
        let lora = profile_by_name("lora").unwrap();
        let mut traffic = TrafficModel::new(600.0, 0.7).unwrap();
        let base = lifetime_years(&lora, &traffic).unwrap();
        traffic.battery_joules *= 2.0;
        let doubled = lifetime_years(&lora, &traffic).unwrap();
        assert!((doubled - 2.0 * base).abs() < 1e-9 * base);
    }

    #[test]
    fn lifetime_strictly_decreasing_in_fraction() {
        let fractions: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        for profile in builtin_profiles() {
            let curve = lifetime_curve(&profile, 3600.0, &fractions).unwrap();
            for pair in curve.windows(2) {
                assert!(
                    pair[1].years < pair[0].years,
                    "{}: {:?} !> {:?}",
                    profile.name,
                    pair[0],
                    pair[1]
                );
            }
        }
    }

    #[test]
    fn lifetime_convex_and_increasing_in_ti() {
        let lora = profile_by_name("lora").unwrap();
        // convexity in fraction at fixed ti
        let f = |x: f64| {
            lifetime_years(&lora, &TrafficModel::new(3600.0, x).unwrap()).unwrap()
        };
        for i in 1..9 {
            let x = i as f64 / 10.0;
            let mid = f(x);
            let chord = (f(x - 0.1) + f(x + 0.1)) / 2.0;
            assert!(mid <= chord + 1e-12, "not convex at {x}");
        }
        // increasing in ti at fixed fraction
        let short = lifetime_years(&lora, &TrafficModel::new(30.0, 0.5).unwrap()).unwrap();
        let long = lifetime_years(&lora, &TrafficModel::new(3600.0, 0.5).unwrap()).unwrap();
        assert!(long > short);
    }

    #[test]
    fn high_traffic_gain_exceeds_low_traffic_gain() {
        let lora = profile_by_name("lora").unwrap();
        let gain = |ti: f64| {
            let full = lifetime_years(&lora, &TrafficModel::new(ti, 1.0).unwrap()).unwrap();
            let half = lifetime_years(&lora, &TrafficModel::new(ti, 0.5).unwrap()).unwrap();
            (half - full) / full
        };
        assert!(gain(30.0) > gain(3600.0));
    }

    #[test]
    fn saturated_channel_rejected() {
        let lora = profile_by_name("lora").unwrap();
        // 1000 bytes at 1000 B/s takes 1 s > ti = 0.5 s
        let traffic = TrafficModel::new(0.5, 1.0).unwrap();
        assert!(matches!(
            lifetime_years(&lora, &traffic),
            Err(Error::ChannelSaturated { .. })
        ));
    }

    #[test]
    fn session_lifetime_full_transmission_has_zero_gain() {
        let series = SyntheticSpec::new(SignalKind::RandomWalk { step_std: 1.0 }, 100, 0.0, 1)
            .generate()
            .unwrap();
        let config = ProtocolConfig::new(ForecasterKind::window(3), 0.0).unwrap();
        let log = run_session(&series, &config).unwrap();
        assert_eq!(log.samples_sent(), 100);
        let lora = profile_by_name("lora").unwrap();
        let sl = session_lifetime(&log, &lora, 3600.0).unwrap();
        assert_eq!(sl.data_fraction, 1.0);
        assert!(sl.gain_pct.abs() < 1e-12);
    }

    #[test]
    fn half_fraction_gain_near_paper_anchor() {
        let lora = profile_by_name("lora").unwrap();
        let full = lifetime_years(&lora, &TrafficModel::new(3600.0, 1.0).unwrap()).unwrap();
        let half = lifetime_years(&lora, &TrafficModel::new(3600.0, 0.5).unwrap()).unwrap();
        let gain_pct = 100.0 * (half - full) / full;
        assert!((70.0..=95.0).contains(&gain_pct), "{gain_pct}");
    }

    #[test]
    fn larger_reduction_gives_larger_gain() {
        let lora = profile_by_name("lora").unwrap();
        let years = |f: f64| lifetime_years(&lora, &TrafficModel::new(3600.0, f).unwrap()).unwrap();
        let base = years(1.0);
        let gain_50 = years(0.5) / base;
        let gain_32 = years(0.32) / base;
        assert!(gain_32 > gain_50);
    }

    #[test]
    fn unknown_tech_lists_valid_names() {
        match profile_by_name("zigbee") {
            Err(Error::UnknownTech { valid, .. }) => assert!(valid.contains("lora")),
            other => panic!("expected UnknownTech, got {other:?}"),
        }
    }
}
