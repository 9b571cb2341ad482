//! Exercises the C surface exactly as a C caller would: through raw
//! pointers, status codes, and the generated header.

use std::ffi::CStr;
use std::ptr;

use ambrosia::forecast::ForecasterKind;
use ambrosia::protocol::{run_session, ProtocolConfig};
use ambrosia::timeseries::{SignalKind, SyntheticSpec};

use ambrosia_ffi::*;

fn series_values() -> Vec<f64> {
    SyntheticSpec::new(
        SignalKind::Sinusoid {
            amplitude: 2.0,
            period: 30.0,
        },
        150,
        0.2,
        5,
    )
    .generate()
    .unwrap()
    .values()
}

#[test]
fn encoder_decoder_pair_stays_in_sync() {
    let values = series_values();
    unsafe {
        let mut enc: *mut AmbrosiaEncoder = ptr::null_mut();
        let mut dec: *mut AmbrosiaDecoder = ptr::null_mut();
        assert_eq!(
            ambrosia_encoder_new_window(5, 0.4, &mut enc),
            AmbrosiaStatus::Ok
        );
        assert_eq!(
            ambrosia_decoder_new_window(5, 0.4, &mut dec),
            AmbrosiaStatus::Ok
        );

        for (i, &v) in values.iter().enumerate() {
            let mut send = false;
            let mut processed = 0.0;
            assert_eq!(
                ambrosia_encoder_step(enc, v, &mut send, &mut processed),
                AmbrosiaStatus::Ok
            );
            let mut reconstructed = 0.0;
            let status = if send {
                ambrosia_decoder_step_received(dec, v, &mut reconstructed)
            } else {
                ambrosia_decoder_step_suppressed(dec, &mut reconstructed)
            };
            assert_eq!(status, AmbrosiaStatus::Ok);
            assert_eq!(
                reconstructed.to_bits(),
                processed.to_bits(),
                "sync violation at index {i}"
            );
            if !send {
                assert!((v - reconstructed).abs() <= 0.4, "error bound at {i}");
            }
        }
        ambrosia_encoder_free(enc);
        ambrosia_decoder_free(dec);
    }
}

#[test]
fn ffi_session_matches_library_session() {
    let values = series_values();
    let series = ambrosia::timeseries::TimeSeries::from_values(&values, 1.0).unwrap();
    let config = ProtocolConfig::new(ForecasterKind::arima(3, 50), 0.5).unwrap();
    let log = run_session(&series, &config).unwrap();

    unsafe {
        let mut enc: *mut AmbrosiaEncoder = ptr::null_mut();
        assert_eq!(
            ambrosia_encoder_new_arima(3, 50, 0.5, &mut enc),
            AmbrosiaStatus::Ok
        );
        for (record, &v) in log.records.iter().zip(&values) {
            let mut send = false;
            let mut processed = 0.0;
            assert_eq!(
                ambrosia_encoder_step(enc, v, &mut send, &mut processed),
                AmbrosiaStatus::Ok
            );
            assert_eq!(send, record.sent, "index {}", record.index);
            assert_eq!(
                processed.to_bits(),
                record.processed_value.to_bits(),
                "index {}",
                record.index
            );
        }
        ambrosia_encoder_free(enc);
    }
}

#[test]
fn invalid_config_reports_code_and_message() {
    unsafe {
        let mut enc: *mut AmbrosiaEncoder = ptr::null_mut();
        assert_eq!(
            ambrosia_encoder_new_window(0, 0.5, &mut enc),
            AmbrosiaStatus::InvalidConfig
        );
        assert!(enc.is_null());
        let msg = CStr::from_ptr(ambrosia_last_error_message())
            .to_string_lossy()
            .into_owned();
        assert!(msg.contains("window"), "{msg}");

        assert_eq!(
            ambrosia_encoder_new_window(2, f64::NAN, &mut enc),
            AmbrosiaStatus::InvalidConfig
        );
        assert_eq!(
            ambrosia_encoder_new_arima(3, 4, 0.5, &mut enc),
            AmbrosiaStatus::InvalidConfig,
            "fit_window below p + 3"
        );
    }
}

#[test]
fn null_pointers_are_rejected_not_crashed() {
    unsafe {
        assert_eq!(
            ambrosia_encoder_new_window(5, 0.5, ptr::null_mut()),
            AmbrosiaStatus::NullPointer
        );
        let mut send = false;
        let mut processed = 0.0;
        assert_eq!(
            ambrosia_encoder_step(ptr::null_mut(), 1.0, &mut send, &mut processed),
            AmbrosiaStatus::NullPointer
        );
        assert_eq!(
            ambrosia_lifetime_years(ptr::null(), 3600.0, 0.5, &mut processed),
            AmbrosiaStatus::NullPointer
        );
        // free of NULL is a documented no-op
        ambrosia_encoder_free(ptr::null_mut());
        ambrosia_decoder_free(ptr::null_mut());
        ambrosia_forest_free(ptr::null_mut());
    }
}

#[test]
fn non_finite_sample_is_flagged() {
    unsafe {
        let mut enc: *mut AmbrosiaEncoder = ptr::null_mut();
        assert_eq!(
            ambrosia_encoder_new_window(2, 0.5, &mut enc),
            AmbrosiaStatus::Ok
        );
        let mut send = false;
        let mut processed = 0.0;
        assert_eq!(
            ambrosia_encoder_step(enc, f64::INFINITY, &mut send, &mut processed),
            AmbrosiaStatus::NonFinite
        );
        ambrosia_encoder_free(enc);
    }
}

#[test]
fn decoder_suppression_in_bootstrap_is_corruption() {
    unsafe {
        let mut dec: *mut AmbrosiaDecoder = ptr::null_mut();
        assert_eq!(
            ambrosia_decoder_new_window(3, 0.5, &mut dec),
            AmbrosiaStatus::Ok
        );
        let mut value = 0.0;
        assert_eq!(
            ambrosia_decoder_step_suppressed(dec, &mut value),
            AmbrosiaStatus::StreamCorruption
        );
        ambrosia_decoder_free(dec);
    }
}

#[test]
fn forest_scores_match_library_and_are_deterministic() {
    let values = series_values();
    let config = ambrosia::anomaly::ForestConfig {
        num_trees: 10,
        tree_capacity: 64,
        shingle: 4,
        seed: 3,
    };
    let series = ambrosia::timeseries::TimeSeries::from_values(&values, 1.0).unwrap();
    let reference = ambrosia::anomaly::score_stream(&series, &config).unwrap();

    unsafe {
        let mut forest: *mut AmbrosiaForest = ptr::null_mut();
        assert_eq!(
            ambrosia_forest_new(10, 64, 4, 3, &mut forest),
            AmbrosiaStatus::Ok
        );
        for (i, &v) in values.iter().enumerate() {
            let mut score = 0.0;
            let mut has_score = false;
            assert_eq!(
                ambrosia_forest_update(forest, v, &mut score, &mut has_score),
                AmbrosiaStatus::Ok
            );
            assert_eq!(has_score, i + 1 >= 4, "index {i}");
            let expected = if has_score { reference[i] } else { 0.0 };
            assert_eq!(score.to_bits(), expected.to_bits(), "index {i}");
        }
        ambrosia_forest_free(forest);

        let mut bad: *mut AmbrosiaForest = ptr::null_mut();
        assert_eq!(
            ambrosia_forest_new(0, 64, 4, 3, &mut bad),
            AmbrosiaStatus::InvalidConfig
        );
    }
}

#[test]
fn lifetime_anchor_through_ffi() {
    unsafe {
        let mut years = 0.0;
        assert_eq!(
            ambrosia_lifetime_years(c"lora".as_ptr(), 3600.0, 1.0, &mut years),
            AmbrosiaStatus::Ok
        );
        assert!((years - 3.54).abs() < 0.02, "{years}");
        assert_eq!(
            ambrosia_lifetime_years(c"zigbee".as_ptr(), 3600.0, 1.0, &mut years),
            AmbrosiaStatus::InvalidConfig
        );
        assert_eq!(
            ambrosia_lifetime_years(c"lora".as_ptr(), 3600.0, 1.5, &mut years),
            AmbrosiaStatus::InvalidConfig
        );
    }
}

#[test]
fn header_declares_the_full_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ambrosia.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for symbol in [
        "AmbrosiaStatus",
        "AmbrosiaEncoder",
        "AmbrosiaDecoder",
        "AmbrosiaForest",
        "ambrosia_encoder_new_window",
        "ambrosia_encoder_new_arima",
        "ambrosia_encoder_step",
        "ambrosia_encoder_free",
        "ambrosia_decoder_step_received",
        "ambrosia_decoder_step_suppressed",
        "ambrosia_forest_new",
        "ambrosia_forest_update",
        "ambrosia_lifetime_years",
        "ambrosia_last_error_message",
        "ambrosia_version",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}

#[test]
fn version_string_is_nul_terminated_package_version() {
    unsafe {
        let v = CStr::from_ptr(ambrosia_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
