#ifndef GRAPHCONC_H
#define GRAPHCONC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_NULL_POINTER = 1,
  GC_STATUS_INVALID_UTF8 = 2,
  GC_STATUS_INVALID_ARGUMENT = 3,
  GC_STATUS_PARSE = 4,
  GC_STATUS_INVALID_MODEL = 5,
  GC_STATUS_STATE_SPACE_TOO_LARGE = 6,
  GC_STATUS_UNDEFINED_DISTRIBUTION = 7,
  GC_STATUS_PRECONDITION = 8,
  GC_STATUS_BUFFER_TOO_SMALL = 9,
  GC_STATUS_PANIC = 10,
} GcStatus;

/**
 * Statistics that need no block structure.
 */
typedef enum GcKind {
  GC_KIND_DEGREE = 0,
  GC_KIND_OUT_DEGREE = 1,
  GC_KIND_IN_DEGREE = 2,
  GC_KIND_ESP = 3,
  GC_KIND_GEODESIC = 4,
} GcKind;

/**
 * Opaque handle to an exactly enumerated graph distribution.
 */
typedef struct GcExact GcExact;

/**
 * Opaque graph handle.
 */
typedef struct GcGraph GcGraph;

/**
 * Scalar dependence coefficients of one statistic.
 */
typedef struct GcProfile {
  size_t units;
  size_t bins;
  double c_n;
  /**
   * Meaningful only when `has_delta_n` is true.
   */
  double delta_n;
  bool has_delta_n;
  double prop1_bound;
  double d_n;
} GcProfile;

typedef struct GcBound {
  double epsilon;
  double confidence;
  bool vacuous;
} GcBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gc_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `capacity > 0`). Returns the full message
 * length without the terminator, or 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be valid for `capacity` bytes, or null with `capacity == 0`.
 */
size_t gc_last_error_message(char *buf, size_t capacity);

/**
 * Empty graph on `n` nodes.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_graph_new(size_t n, bool directed, struct GcGraph **out);

/**
 * Parses the edge-list text format. Any blocks section is ignored.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum GcStatus gc_graph_parse(const char *text, struct GcGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be used afterwards. Null is a
 * no-op.
 */
void gc_graph_free(struct GcGraph *g);

/**
 * Node count, 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t gc_graph_node_count(const struct GcGraph *g);

/**
 * Edge count, 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t gc_graph_edge_count(const struct GcGraph *g);

/**
 * # Safety
 * `g` must be null or a live handle.
 */
bool gc_graph_is_directed(const struct GcGraph *g);

/**
 * False for a null handle or out-of-range nodes.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
bool gc_graph_has_edge(const struct GcGraph *g, size_t i, size_t j);

/**
 * Adds or removes edge `(i, j)`, 0-based.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum GcStatus gc_graph_set_edge(struct GcGraph *g, size_t i, size_t j, bool present);

/**
 * Writes the edge-list text, NUL-terminated. `*len` excludes the NUL, so
 * `capacity` must be at least `*len + 1`.
 *
 * # Safety
 * `buf` must be valid for `capacity` bytes; `len` must be valid for writes.
 */
enum GcStatus gc_graph_to_edge_list(const struct GcGraph *g,
                                    char *buf,
                                    size_t capacity,
                                    size_t *len);

/**
 * Empirical distribution `s_k / M` of `kind` on `g`.
 *
 * # Safety
 * `out` must be valid for `capacity` doubles; `len` must be valid for
 * writes.
 */
enum GcStatus gc_graph_distribution(const struct GcGraph *g,
                                    enum GcKind kind,
                                    double *out,
                                    size_t capacity,
                                    size_t *len);

/**
 * Samples one graph from a model given as JSON. `nodes == 0` takes the
 * size from the model. MCMC models use the default study schedule.
 *
 * # Safety
 * `model_json` must be a NUL-terminated string; `out` must be valid for
 * writes.
 */
enum GcStatus gc_model_sample(const char *model_json,
                              size_t nodes,
                              uint64_t seed,
                              struct GcGraph **out);

/**
 * Enumerates the law of a model given as JSON. `nodes == 0` takes the
 * size from the model.
 *
 * # Safety
 * `model_json` must be a NUL-terminated string; `out` must be valid for
 * writes.
 */
enum GcStatus gc_exact_from_model(const char *model_json, size_t nodes, struct GcExact **out);

/**
 * New distribution conditioned on a support predicate (`all`, `edges=m`,
 * `max-edges=m`, `max-degree=d`).
 *
 * # Safety
 * `d` must be a live handle, `predicate` a NUL-terminated string and `out`
 * valid for writes.
 */
enum GcStatus gc_exact_condition(const struct GcExact *d,
                                 const char *predicate,
                                 struct GcExact **out);

/**
 * # Safety
 * `d` must come from this library and not be used afterwards. Null is a
 * no-op.
 */
void gc_exact_free(struct GcExact *d);

/**
 * Number of stored graphs, 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t gc_exact_state_count(const struct GcExact *d);

/**
 * Exact `E F_N` for `kind`.
 *
 * # Safety
 * `out` must be valid for `capacity` doubles; `len` must be valid for
 * writes.
 */
enum GcStatus gc_exact_theta_star(const struct GcExact *d,
                                  enum GcKind kind,
                                  double *out,
                                  size_t capacity,
                                  size_t *len);

/**
 * Exact `P(|F_N - theta*|_inf >= t)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_exact_tail_prob(const struct GcExact *d, enum GcKind kind, double t, double *out);

/**
 * Exact dependence coefficients over the whole support.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_exact_profile(const struct GcExact *d, enum GcKind kind, struct GcProfile *out);

/**
 * Evaluates a bound request given as JSON, e.g.
 * `{"bound": "Thm1-exp", "D_N": 2.5, "M": 100, "p": 4}`.
 *
 * # Safety
 * `request_json` must be a NUL-terminated string; `out` must be valid for
 * writes.
 */
enum GcStatus gc_bound_evaluate(const char *request_json, struct GcBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHCONC_H */
