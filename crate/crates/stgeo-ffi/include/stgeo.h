/* stgeo C API: space-time block code geometry.
 * Complex matrices cross this boundary as double arrays of length 2*T*k,
 * row-major, each entry as [re, im]. */

#ifndef STGEO_H
#define STGEO_H

/* Generated by cbindgen from stgeo-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every stgeo call.
 */
typedef enum StgeoStatus {
  STGEO_STATUS_OK = 0,
  STGEO_STATUS_NULL_ARGUMENT = 1,
  STGEO_STATUS_INVALID_INPUT = 2,
  STGEO_STATUS_SHAPE_MISMATCH = 3,
  STGEO_STATUS_UNSUPPORTED_GEOMETRY = 4,
  STGEO_STATUS_DEGENERATE_PAIR = 5,
  STGEO_STATUS_DEGENERATE_CODE = 6,
  STGEO_STATUS_PARSE_ERROR = 7,
  STGEO_STATUS_VALIDATION_ERROR = 8,
  STGEO_STATUS_IO_ERROR = 9,
  STGEO_STATUS_UTF8_ERROR = 10,
  STGEO_STATUS_INTERNAL_PANIC = 11,
} StgeoStatus;

/**
 * Opaque codebook handle; create via load/parse, release via
 * `stgeo_codebook_free`.
 */
typedef struct StgeoCodebook StgeoCodebook;

/**
 * Codebook pairwise minima for one channel.
 */
typedef struct StgeoCodeStats {
  double min_dsum;
  double min_dprod;
  double min_div;
  /**
   * Pair attaining min_dsum.
   */
  uintptr_t argmin_i;
  uintptr_t argmin_j;
} StgeoCodeStats;

/**
 * Receiver-induced geometry of one symbol pair.
 */
typedef struct StgeoPairGeometry {
  /**
   * Coherent metric: Frobenius norm of the frame difference.
   */
  double d_coh;
  /**
   * Chordal distance (non-coherent receiver metric).
   */
  double d_noncoh;
  /**
   * Fiber minimum of the coherent metric over both spans.
   */
  double dist;
  /**
   * Fiber minimum of the diversity product.
   */
  double pdist;
} StgeoPairGeometry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *stgeo_version(void);

/**
 * Message of the most recent failure on this thread. Valid until the next
 * failing call; never NULL.
 */
const char *stgeo_last_error_message(void);

/**
 * Loads a codebook JSON file. On success writes a new handle to `out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StgeoStatus stgeo_codebook_load(const char *path, struct StgeoCodebook **out);

/**
 * Parses a codebook from a JSON string.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StgeoStatus stgeo_codebook_from_json(const char *json, struct StgeoCodebook **out);

/**
 * Writes a codebook to a JSON file.
 *
 * # Safety
 * `book` must be a live handle from this library; `path` NUL-terminated.
 */
enum StgeoStatus stgeo_codebook_store(const struct StgeoCodebook *book, const char *path);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `book` must be a handle from this library, not yet freed.
 */
void stgeo_codebook_free(struct StgeoCodebook *book);

/**
 * Number of symbols; 0 for a NULL handle.
 *
 * # Safety
 * `book` must be a live handle or NULL.
 */
uintptr_t stgeo_codebook_size(const struct StgeoCodebook *book);

/**
 * Block length T; 0 for a NULL handle.
 *
 * # Safety
 * `book` must be a live handle or NULL.
 */
uintptr_t stgeo_codebook_block_len(const struct StgeoCodebook *book);

/**
 * Transmit antennas k; 0 for a NULL handle.
 *
 * # Safety
 * `book` must be a live handle or NULL.
 */
uintptr_t stgeo_codebook_antennas(const struct StgeoCodebook *book);

/**
 * Rate (1/T) log2 |C| in bits per channel use.
 *
 * # Safety
 * `book` must be a live handle; `out` a valid pointer.
 */
enum StgeoStatus stgeo_codebook_rate(const struct StgeoCodebook *book, double *out);

/**
 * Copies symbol `index` into `out` (length 2·T·k, row-major, re/im
 * interleaved).
 *
 * # Safety
 * `book` must be a live handle; `out` must hold 2·T·k doubles.
 */
enum StgeoStatus stgeo_codebook_symbol(const struct StgeoCodebook *book,
                                       uintptr_t index,
                                       double *out);

/**
 * Exhaustive pairwise minima of a codebook under one channel.
 *
 * # Safety
 * `book` must be a live handle; `out` a valid pointer.
 */
enum StgeoStatus stgeo_code_stats(const struct StgeoCodebook *book,
                                  double rho,
                                  uintptr_t n_r,
                                  bool coherent,
                                  struct StgeoCodeStats *out);

/**
 * Receiver metrics and fiber minima of one pair of T×k frames.
 *
 * # Safety
 * `a` and `b` must hold 2·T·k doubles each; `out` must be valid.
 */
enum StgeoStatus stgeo_pair_geometry(uintptr_t t,
                                     uintptr_t k,
                                     const double *a,
                                     const double *b,
                                     struct StgeoPairGeometry *out);

/**
 * Exact pairwise error probability of mistaking one frame for the other.
 *
 * # Safety
 * `a` and `b` must hold 2·T·k doubles each; `out` must be valid.
 */
enum StgeoStatus stgeo_exact_pep(uintptr_t t,
                                 uintptr_t k,
                                 const double *a,
                                 const double *b,
                                 double rho,
                                 uintptr_t n_r,
                                 bool coherent,
                                 double *out);

/**
 * Chernov bound on the pairwise error probability (½ Div^{−n_r}).
 *
 * # Safety
 * `a` and `b` must hold 2·T·k doubles each; `out` must be valid.
 */
enum StgeoStatus stgeo_chernov_bound(uintptr_t t,
                                     uintptr_t k,
                                     const double *a,
                                     const double *b,
                                     double rho,
                                     uintptr_t n_r,
                                     bool coherent,
                                     double *out);

/**
 * Haar-random n×n unitary, deterministic per seed; writes 2·n·n doubles.
 *
 * # Safety
 * `out` must hold 2·n·n doubles.
 */
enum StgeoStatus stgeo_haar_unitary(uintptr_t n, uint64_t seed, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* STGEO_H */
