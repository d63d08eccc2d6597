#ifndef RISNET_H
#define RISNET_H

/* Generated by cbindgen from risnet-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RisnetStatus {
  RISNET_STATUS_OK = 0,
  RISNET_STATUS_NULL_ARGUMENT = 1,
  RISNET_STATUS_INVALID_ARGUMENT = 2,
  RISNET_STATUS_CONFIG_ERROR = 3,
  RISNET_STATUS_NUMERICAL_ERROR = 4,
  RISNET_STATUS_BUFFER_TOO_SMALL = 5,
  RISNET_STATUS_INTERNAL_PANIC = 6,
} RisnetStatus;

/**
 * Which assembled matrix to copy out.
 */
typedef enum RisnetMatrixKind {
  RISNET_MATRIX_KIND_IMPEDANCE = 0,
  RISNET_MATRIX_KIND_SCATTERING = 1,
} RisnetMatrixKind;

/**
 * Load-optimization algorithm selector.
 */
typedef enum RisnetAlgorithm {
  /**
   * Phase-domain first-order ascent on the scattering representation.
   */
  RISNET_ALGORITHM_PHASE_ASCENT = 0,
  /**
   * Reactance-domain first-order ascent on the impedance representation.
   */
  RISNET_ALGORITHM_REACTANCE_ASCENT = 1,
} RisnetAlgorithm;

/**
 * Opaque handle to an assembled scene (port partition plus impedance and
 * scattering matrices).
 */
typedef struct RisnetScene RisnetScene;

/**
 * Opaque handle to one optimization run's full trace.
 */
typedef struct RisnetTrace RisnetTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *risnet_last_error(void);

/**
 * Assemble a scene from a TOML config file.
 *
 * # Safety
 * `path` must point to a NUL-terminated string; `out` must point to
 * writable storage for one pointer. On OK, `*out` owns the scene and must
 * be released with `risnet_scene_free`.
 */
enum RisnetStatus risnet_scene_load(const char *path,
                                    bool remove_direct_link,
                                    struct RisnetScene **out);

/**
 * Assemble the built-in 28 GHz reference scene with the given column
 * spacing divisor (column spacing = wavelength / q_divisor).
 *
 * # Safety
 * `out` must point to writable storage for one pointer. On OK, `*out`
 * owns the scene and must be released with `risnet_scene_free`.
 */
enum RisnetStatus risnet_scene_reference(double q_divisor,
                                         bool remove_direct_link,
                                         struct RisnetScene **out);

/**
 * Release a scene handle. Null is a no-op.
 *
 * # Safety
 * `scene` must be a pointer returned by a scene constructor that has not
 * been freed already.
 */
void risnet_scene_free(struct RisnetScene *scene);

/**
 * Port counts of the scene's three groups.
 *
 * # Safety
 * `scene` must be a live scene handle; the out-pointers must each point
 * to writable storage for one `size_t`.
 */
enum RisnetStatus risnet_scene_ports(const struct RisnetScene *scene,
                                     size_t *out_tx,
                                     size_t *out_surface,
                                     size_t *out_rx);

/**
 * Copy the assembled N x N matrix into `out` as row-major interleaved
 * re/im pairs. `len` must be exactly 2*N*N (N = total port count).
 *
 * # Safety
 * `scene` must be a live scene handle; `out` must point to writable
 * storage for `len` doubles.
 */
enum RisnetStatus risnet_scene_matrix(const struct RisnetScene *scene,
                                      enum RisnetMatrixKind kind,
                                      double *out,
                                      size_t len);

/**
 * Run a load optimization on the scene with default step schedules.
 * `extra_starts` adds seeded random restarts (phase ascent only; pass 0
 * otherwise). Iteration budget `max_iters` must be at least 1.
 *
 * # Safety
 * `scene` must be a live scene handle; `out` must point to writable
 * storage for one pointer. On OK, `*out` owns the trace and must be
 * released with `risnet_trace_free`.
 */
enum RisnetStatus risnet_scene_optimize(const struct RisnetScene *scene,
                                        enum RisnetAlgorithm algorithm,
                                        size_t max_iters,
                                        size_t extra_starts,
                                        uint64_t seed,
                                        struct RisnetTrace **out);

/**
 * Release a trace handle. Null is a no-op.
 *
 * # Safety
 * `trace` must be a pointer returned by `risnet_scene_optimize` that has
 * not been freed already.
 */
void risnet_trace_free(struct RisnetTrace *trace);

/**
 * Number of recorded iterations (the initial state is iteration 0 and is
 * not counted).
 *
 * # Safety
 * `trace` must be a live trace handle; `out` must point to writable
 * storage for one `size_t`.
 */
enum RisnetStatus risnet_trace_iterations(const struct RisnetTrace *trace, size_t *out);

/**
 * Received power gain after the given iteration; iteration 0 is the
 * initial state.
 *
 * # Safety
 * `trace` must be a live trace handle; `out` must point to writable
 * storage for one double.
 */
enum RisnetStatus risnet_trace_gain(const struct RisnetTrace *trace, size_t iteration, double *out);

/**
 * Final received power gain of the run.
 *
 * # Safety
 * `trace` must be a live trace handle; `out` must point to writable
 * storage for one double.
 */
enum RisnetStatus risnet_trace_final_gain(const struct RisnetTrace *trace, double *out);

/**
 * Number of tunable loads in the final state.
 *
 * # Safety
 * `trace` must be a live trace handle; `out` must point to writable
 * storage for one `size_t`.
 */
enum RisnetStatus risnet_trace_phase_count(const struct RisnetTrace *trace, size_t *out);

/**
 * Copy the final load phases (radians, in (-pi, pi]) into `out`. `len`
 * must equal the value from `risnet_trace_phase_count`.
 *
 * # Safety
 * `trace` must be a live trace handle; `out` must point to writable
 * storage for `len` doubles.
 */
enum RisnetStatus risnet_trace_phases(const struct RisnetTrace *trace, double *out, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RISNET_H */
