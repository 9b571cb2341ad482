/* C ABI for the ambrosia dual-prediction data-reduction protocol. */

#ifndef AMBROSIA_H
#define AMBROSIA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible FFI call.
 */
typedef enum AmbrosiaStatus {
  AmbrosiaStatus_Ok = 0,
  /**
   * A required pointer argument was NULL.
   */
  AmbrosiaStatus_NullPointer = 1,
  /**
   * Rejected configuration or argument values.
   */
  AmbrosiaStatus_InvalidConfig = 2,
  /**
   * The model has not seen enough observations yet.
   */
  AmbrosiaStatus_InsufficientHistory = 3,
  /**
   * A non-finite sample value was passed in.
   */
  AmbrosiaStatus_NonFinite = 4,
  /**
   * Received data violates the protocol invariants.
   */
  AmbrosiaStatus_StreamCorruption = 5,
  AmbrosiaStatus_Unknown = 6,
} AmbrosiaStatus;

/**
 * Server-side reconstruction state machine (opaque).
 */
typedef struct AmbrosiaDecoder AmbrosiaDecoder;

/**
 * Sensor-side send/suppress state machine (opaque).
 */
typedef struct AmbrosiaEncoder AmbrosiaEncoder;

/**
 * Streaming random-cut-forest anomaly scorer (opaque).
 */
typedef struct AmbrosiaForest AmbrosiaForest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the most recent failure on this thread. Valid until the
 * next failing call on the same thread; never NULL.
 */
const char *ambrosia_last_error_message(void);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *ambrosia_version(void);

/**
 * Creates an encoder running the window scheme (`w >= 1`).
 *
 * # Safety
 * `out` must be a valid pointer to an encoder-handle slot.
 */
enum AmbrosiaStatus ambrosia_encoder_new_window(uintptr_t w,
                                                double delta,
                                                struct AmbrosiaEncoder **out);

/**
 * Creates an encoder running the AR scheme fitted on the leading
 * `fit_window` samples (`fit_window >= p + 3`).
 *
 * # Safety
 * `out` must be a valid pointer to an encoder-handle slot.
 */
enum AmbrosiaStatus ambrosia_encoder_new_arima(uintptr_t p,
                                               uintptr_t fit_window,
                                               double delta,
                                               struct AmbrosiaEncoder **out);

/**
 * Feeds one true sample. On `Ok`, `*out_send` says whether the sample must
 * be transmitted and `*out_processed` is the value both endpoints record
 * (the true value when sent, the prediction when suppressed).
 *
 * # Safety
 * All pointers must be valid; `encoder` must be a live encoder handle.
 */
enum AmbrosiaStatus ambrosia_encoder_step(struct AmbrosiaEncoder *encoder,
                                          double true_value,
                                          bool *out_send,
                                          double *out_processed);

/**
 * Releases an encoder handle. NULL is a no-op.
 *
 * # Safety
 * `encoder` must be NULL or a handle not yet freed.
 */
void ambrosia_encoder_free(struct AmbrosiaEncoder *encoder);

/**
 * Creates a decoder running the window scheme; must use the same
 * parameters as the encoder it pairs with.
 *
 * # Safety
 * `out` must be a valid pointer to a decoder-handle slot.
 */
enum AmbrosiaStatus ambrosia_decoder_new_window(uintptr_t w,
                                                double delta,
                                                struct AmbrosiaDecoder **out);

/**
 * Creates a decoder running the AR scheme; must use the same parameters as
 * the encoder it pairs with.
 *
 * # Safety
 * `out` must be a valid pointer to a decoder-handle slot.
 */
enum AmbrosiaStatus ambrosia_decoder_new_arima(uintptr_t p,
                                               uintptr_t fit_window,
                                               double delta,
                                               struct AmbrosiaDecoder **out);

/**
 * Consumes one received (transmitted) value; `*out_value` is the
 * reconstructed sample.
 *
 * # Safety
 * All pointers must be valid; `decoder` must be a live decoder handle.
 */
enum AmbrosiaStatus ambrosia_decoder_step_received(struct AmbrosiaDecoder *decoder,
                                                   double value,
                                                   double *out_value);

/**
 * Consumes one suppressed slot; `*out_value` is the decoder's own
 * prediction, bit-identical to what the encoder recorded.
 *
 * # Safety
 * All pointers must be valid; `decoder` must be a live decoder handle.
 */
enum AmbrosiaStatus ambrosia_decoder_step_suppressed(struct AmbrosiaDecoder *decoder,
                                                     double *out_value);

/**
 * Releases a decoder handle. NULL is a no-op.
 *
 * # Safety
 * `decoder` must be NULL or a handle not yet freed.
 */
void ambrosia_decoder_free(struct AmbrosiaDecoder *decoder);

/**
 * Creates a forest of `num_trees` random cut trees over shingles of
 * `shingle` consecutive samples, evicting FIFO at `tree_capacity`.
 *
 * # Safety
 * `out` must be a valid pointer to a forest-handle slot.
 */
enum AmbrosiaStatus ambrosia_forest_new(uintptr_t num_trees,
                                        uintptr_t tree_capacity,
                                        uintptr_t shingle,
                                        uint64_t seed,
                                        struct AmbrosiaForest **out);

/**
 * Feeds one sample. `*out_has_score` is false while the first shingle is
 * still filling; once true, `*out_score` is the forest-mean collusive
 * displacement of the newest shingle.
 *
 * # Safety
 * All pointers must be valid; `forest` must be a live forest handle.
 */
enum AmbrosiaStatus ambrosia_forest_update(struct AmbrosiaForest *forest,
                                           double value,
                                           double *out_score,
                                           bool *out_has_score);

/**
 * Releases a forest handle. NULL is a no-op.
 *
 * # Safety
 * `forest` must be NULL or a handle not yet freed.
 */
void ambrosia_forest_free(struct AmbrosiaForest *forest);

/**
 * Battery lifetime in years for a built-in radio technology
 * ("802.11psm", "ble", "802.15.4", "lora", "sigfox") at transmission
 * interval `ti` seconds and data fraction in [0, 1].
 *
 * # Safety
 * `tech` must be a valid NUL-terminated string; `out_years` must be valid.
 */
enum AmbrosiaStatus ambrosia_lifetime_years(const char *tech,
                                            double ti,
                                            double data_fraction,
                                            double *out_years);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* AMBROSIA_H */
