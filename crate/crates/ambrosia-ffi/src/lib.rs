//! C ABI for the ambrosia protocol: opaque handles for the sensor-side
//! encoder, server-side decoder, and anomaly-scoring forest, plus the
//! battery-lifetime model.
//!
//! Conventions:
//! - Every fallible call returns an [`AmbrosiaStatus`]; outputs go through
//!   pointer parameters and are written only on `Ok`.
//! - `ambrosia_last_error_message` returns a thread-local, NUL-terminated
//!   description of the most recent failure on the calling thread.
//! - Handles are created by `*_new_*` and released by the matching `*_free`;
//!   passing a handle to any other function after `free` is undefined
//!   behavior, as is sharing one handle across threads without locking.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use ambrosia::anomaly::{Forest, ForestConfig};
use ambrosia::energy::{lifetime_years, profile_by_name, TrafficModel};
use ambrosia::error::Error;
use ambrosia::forecast::ForecasterKind;
use ambrosia::protocol::{Decision, DecoderState, EncoderState, ProtocolConfig};

/// Result of every fallible FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbrosiaStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Rejected configuration or argument values.
    InvalidConfig = 2,
    /// The model has not seen enough observations yet.
    InsufficientHistory = 3,
    /// A non-finite sample value was passed in.
    NonFinite = 4,
    /// Received data violates the protocol invariants.
    StreamCorruption = 5,
    Unknown = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(e: Error) -> AmbrosiaStatus {
    let status = match &e {
        Error::InvalidConfig(_)
        | Error::UnknownTech { .. }
        | Error::EmptySeries
        | Error::SeriesTooShort { .. }
        | Error::ChannelSaturated { .. }
        | Error::AnomalyIndexOutOfRange { .. }
        | Error::DimensionMismatch { .. } => AmbrosiaStatus::InvalidConfig,
        Error::InsufficientHistory { .. } | Error::NotFitted => {
            AmbrosiaStatus::InsufficientHistory
        }
        Error::NonFiniteInput(_) | Error::NonFiniteValue { .. } => AmbrosiaStatus::NonFinite,
        Error::StreamCorruption(_) | Error::PointAbsent => AmbrosiaStatus::StreamCorruption,
        _ => AmbrosiaStatus::Unknown,
    };
    let msg = CString::new(e.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    status
}

fn null_pointer() -> AmbrosiaStatus {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new("null pointer argument").expect("static message")
    });
    AmbrosiaStatus::NullPointer
}

/// Description of the most recent failure on this thread. Valid until the
/// next failing call on the same thread; never NULL.
#[no_mangle]
pub extern "C" fn ambrosia_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ambrosia_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ---------------------------------------------------------------------------
// encoder

/// Sensor-side send/suppress state machine (opaque).
pub struct AmbrosiaEncoder {
    inner: EncoderState,
}

/// Server-side reconstruction state machine (opaque).
pub struct AmbrosiaDecoder {
    inner: DecoderState,
}

fn window_config(w: usize, delta: f64) -> Result<ProtocolConfig, Error> {
    ProtocolConfig::new(ForecasterKind::window(w), delta)
}

fn arima_config(p: usize, fit_window: usize, delta: f64) -> Result<ProtocolConfig, Error> {
    ProtocolConfig::new(ForecasterKind::arima(p, fit_window), delta)
}

unsafe fn new_encoder(
    config: Result<ProtocolConfig, Error>,
    out: *mut *mut AmbrosiaEncoder,
) -> AmbrosiaStatus {
    if out.is_null() {
        return null_pointer();
    }
    match config.and_then(EncoderState::new) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(AmbrosiaEncoder { inner }));
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates an encoder running the window scheme (`w >= 1`).
///
/// # Safety
/// `out` must be a valid pointer to an encoder-handle slot.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_encoder_new_window(
    w: usize,
    delta: f64,
    out: *mut *mut AmbrosiaEncoder,
) -> AmbrosiaStatus {
    new_encoder(window_config(w, delta), out)
}

/// Creates an encoder running the AR scheme fitted on the leading
/// `fit_window` samples (`fit_window >= p + 3`).
///
/// # Safety
/// `out` must be a valid pointer to an encoder-handle slot.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_encoder_new_arima(
    p: usize,
    fit_window: usize,
    delta: f64,
    out: *mut *mut AmbrosiaEncoder,
) -> AmbrosiaStatus {
    new_encoder(arima_config(p, fit_window, delta), out)
}

/// Feeds one true sample. On `Ok`, `*out_send` says whether the sample must
/// be transmitted and `*out_processed` is the value both endpoints record
/// (the true value when sent, the prediction when suppressed).
///
/// # Safety
/// All pointers must be valid; `encoder` must be a live encoder handle.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_encoder_step(
    encoder: *mut AmbrosiaEncoder,
    true_value: f64,
    out_send: *mut bool,
    out_processed: *mut f64,
) -> AmbrosiaStatus {
    if encoder.is_null() || out_send.is_null() || out_processed.is_null() {
        return null_pointer();
    }
    match (*encoder).inner.step(true_value) {
        Ok(decision) => {
            *out_send = matches!(decision, Decision::Send(_));
            *out_processed = decision.processed_value();
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases an encoder handle. NULL is a no-op.
///
/// # Safety
/// `encoder` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_encoder_free(encoder: *mut AmbrosiaEncoder) {
    if !encoder.is_null() {
        drop(Box::from_raw(encoder));
    }
}

// ---------------------------------------------------------------------------
// decoder

unsafe fn new_decoder(
    config: Result<ProtocolConfig, Error>,
    out: *mut *mut AmbrosiaDecoder,
) -> AmbrosiaStatus {
    if out.is_null() {
        return null_pointer();
    }
    match config.and_then(DecoderState::new) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(AmbrosiaDecoder { inner }));
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates a decoder running the window scheme; must use the same
/// parameters as the encoder it pairs with.
///
/// # Safety
/// `out` must be a valid pointer to a decoder-handle slot.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_decoder_new_window(
    w: usize,
    delta: f64,
    out: *mut *mut AmbrosiaDecoder,
) -> AmbrosiaStatus {
    new_decoder(window_config(w, delta), out)
}

/// Creates a decoder running the AR scheme; must use the same parameters as
/// the encoder it pairs with.
///
/// # Safety
/// `out` must be a valid pointer to a decoder-handle slot.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_decoder_new_arima(
    p: usize,
    fit_window: usize,
    delta: f64,
    out: *mut *mut AmbrosiaDecoder,
) -> AmbrosiaStatus {
    new_decoder(arima_config(p, fit_window, delta), out)
}

/// Consumes one received (transmitted) value; `*out_value` is the
/// reconstructed sample.
///
/// # Safety
/// All pointers must be valid; `decoder` must be a live decoder handle.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_decoder_step_received(
    decoder: *mut AmbrosiaDecoder,
    value: f64,
    out_value: *mut f64,
) -> AmbrosiaStatus {
    if decoder.is_null() || out_value.is_null() {
        return null_pointer();
    }
    match (*decoder).inner.step(Some(value)) {
        Ok(v) => {
            *out_value = v;
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Consumes one suppressed slot; `*out_value` is the decoder's own
/// prediction, bit-identical to what the encoder recorded.
///
/// # Safety
/// All pointers must be valid; `decoder` must be a live decoder handle.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_decoder_step_suppressed(
    decoder: *mut AmbrosiaDecoder,
    out_value: *mut f64,
) -> AmbrosiaStatus {
    if decoder.is_null() || out_value.is_null() {
        return null_pointer();
    }
    match (*decoder).inner.step(None) {
        Ok(v) => {
            *out_value = v;
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a decoder handle. NULL is a no-op.
///
/// # Safety
/// `decoder` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_decoder_free(decoder: *mut AmbrosiaDecoder) {
    if !decoder.is_null() {
        drop(Box::from_raw(decoder));
    }
}

// ---------------------------------------------------------------------------
// anomaly forest

/// Streaming random-cut-forest anomaly scorer (opaque).
pub struct AmbrosiaForest {
    inner: Forest,
}

/// Creates a forest of `num_trees` random cut trees over shingles of
/// `shingle` consecutive samples, evicting FIFO at `tree_capacity`.
///
/// # Safety
/// `out` must be a valid pointer to a forest-handle slot.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_forest_new(
    num_trees: usize,
    tree_capacity: usize,
    shingle: usize,
    seed: u64,
    out: *mut *mut AmbrosiaForest,
) -> AmbrosiaStatus {
    if out.is_null() {
        return null_pointer();
    }
    let config = ForestConfig {
        num_trees,
        tree_capacity,
        shingle,
        seed,
    };
    match Forest::new(config) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(AmbrosiaForest { inner }));
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Feeds one sample. `*out_has_score` is false while the first shingle is
/// still filling; once true, `*out_score` is the forest-mean collusive
/// displacement of the newest shingle.
///
/// # Safety
/// All pointers must be valid; `forest` must be a live forest handle.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_forest_update(
    forest: *mut AmbrosiaForest,
    value: f64,
    out_score: *mut f64,
    out_has_score: *mut bool,
) -> AmbrosiaStatus {
    if forest.is_null() || out_score.is_null() || out_has_score.is_null() {
        return null_pointer();
    }
    match (*forest).inner.update(value) {
        Ok(score) => {
            *out_has_score = score.is_some();
            *out_score = score.unwrap_or(0.0);
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a forest handle. NULL is a no-op.
///
/// # Safety
/// `forest` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_forest_free(forest: *mut AmbrosiaForest) {
    if !forest.is_null() {
        drop(Box::from_raw(forest));
    }
}

// ---------------------------------------------------------------------------
// energy model

/// Battery lifetime in years for a built-in radio technology
/// ("802.11psm", "ble", "802.15.4", "lora", "sigfox") at transmission
/// interval `ti` seconds and data fraction in [0, 1].
///
/// # Safety
/// `tech` must be a valid NUL-terminated string; `out_years` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ambrosia_lifetime_years(
    tech: *const c_char,
    ti: f64,
    data_fraction: f64,
    out_years: *mut f64,
) -> AmbrosiaStatus {
    if tech.is_null() || out_years.is_null() {
        return null_pointer();
    }
    let name = match CStr::from_ptr(tech).to_str() {
        Ok(s) => s,
        Err(_) => return fail(Error::InvalidConfig("tech name is not UTF-8".into())),
    };
    let result = profile_by_name(name)
        .and_then(|profile| Ok((profile, TrafficModel::new(ti, data_fraction)?)))
        .and_then(|(profile, traffic)| lifetime_years(&profile, &traffic));
    match result {
        Ok(years) => {
            *out_years = years;
            AmbrosiaStatus::Ok
        }
        Err(e) => fail(e),
    }
}
