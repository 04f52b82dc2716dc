#ifndef TVERBERG_H
#define TVERBERG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TvStatus {
  TV_STATUS_OK = 0,
  TV_STATUS_NULL_POINTER = 1,
  TV_STATUS_INVALID_INPUT = 2,
  TV_STATUS_DUPLICATE_POINTS = 3,
  TV_STATUS_UNSUPPORTED = 4,
  TV_STATUS_TOO_LARGE = 5,
  TV_STATUS_CERTIFICATE_FAILURE = 6,
  TV_STATUS_NO_CYCLE_FOUND = 7,
  TV_STATUS_ITERATION_LIMIT = 8,
  TV_STATUS_PANIC = 9,
} TvStatus;

typedef enum TvCostFunction {
  TV_COST_FUNCTION_IDENTITY = 0,
  TV_COST_FUNCTION_SQUARE = 1,
  TV_COST_FUNCTION_SQRT = 2,
} TvCostFunction;

typedef enum TvClassification {
  TV_CLASSIFICATION_OPEN = 0,
  TV_CLASSIFICATION_CLOSED_BOUNDARY = 1,
  TV_CLASSIFICATION_NONE = 2,
} TvClassification;

typedef struct TvCertificate TvCertificate;

typedef struct TvEdges TvEdges;

typedef struct TvPointSet TvPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *tv_last_error(void);

// Copies `n * dim` row-major coordinates into a new point set.
//
// # Safety
// `coords` must point to `n * dim` readable doubles.
enum TvStatus tv_pointset_new(const double *coords, size_t n, size_t dim, struct TvPointSet **out);

// # Safety
// `ps` must be null or a handle from [`tv_pointset_new`] not yet freed.
void tv_pointset_free(struct TvPointSet *ps);

// # Safety
// `ps` must be a live handle.
size_t tv_pointset_len(const struct TvPointSet *ps);

// # Safety
// `ps` must be a live handle.
size_t tv_pointset_dim(const struct TvPointSet *ps);

// Builds an edge list from `count` index pairs stored as `2 * count` values.
//
// # Safety
// `pairs` must point to `2 * count` readable values.
enum TvStatus tv_edges_new(const size_t *pairs, size_t count, struct TvEdges **out);

// # Safety
// `edges` must be null or a live handle.
void tv_edges_free(struct TvEdges *edges);

// # Safety
// `edges` must be a live handle.
size_t tv_edges_len(const struct TvEdges *edges);

// Endpoints of edge `k`, smaller index first.
//
// # Safety
// `edges` must be a live handle; `a` and `b` must be writable.
enum TvStatus tv_edges_get(const struct TvEdges *edges, size_t k, size_t *a, size_t *b);

// Spanning tree maximizing the sum of `f(|a - b|)` over its edges.
//
// # Safety
// `ps` must be a live handle; `out` must be writable.
enum TvStatus tv_max_sum_tree(const struct TvPointSet *ps,
                              enum TvCostFunction f,
                              struct TvEdges **out);

// Perfect matching maximizing the total edge length.
//
// # Safety
// `ps` must be a live handle; `out` must be writable.
enum TvStatus tv_max_sum_matching(const struct TvPointSet *ps, struct TvEdges **out);

// Minimizer certificate for the balls induced by `edges`.
//
// # Safety
// `ps` and `edges` must be live handles; `out` must be writable.
enum TvStatus tv_verify(const struct TvPointSet *ps,
                        const struct TvEdges *edges,
                        struct TvCertificate **out);

// Enclosing-ball-center certificate for a spanning tree.
//
// # Safety
// `ps` and `tree` must be live handles; `out` must be writable.
enum TvStatus tv_tree_witness(const struct TvPointSet *ps,
                              const struct TvEdges *tree,
                              struct TvCertificate **out);

// Improves a planar perfect matching until its open balls share a point.
// `steps` (optional) receives the number of swaps performed.
//
// # Safety
// `ps` and `initial` must be live handles; `out_edges` and `out_cert` must
// be writable; `steps` may be null.
enum TvStatus tv_local_search(const struct TvPointSet *ps,
                              const struct TvEdges *initial,
                              size_t max_iters,
                              struct TvEdges **out_edges,
                              struct TvCertificate **out_cert,
                              size_t *steps);

// Depth of the max-sum matching divided by the minimum pairwise distance.
//
// # Safety
// `ps` must be a live handle; `out` must be writable.
enum TvStatus tv_depth_ratio(const struct TvPointSet *ps, double *out);

// # Safety
// `cert` must be null or a live handle.
void tv_certificate_free(struct TvCertificate *cert);

// # Safety
// `cert` must be a live handle.
enum TvClassification tv_certificate_classification(const struct TvCertificate *cert);

// Objective value at the witness; NaN for a null handle.
//
// # Safety
// `cert` must be a live handle.
double tv_certificate_value(const struct TvCertificate *cert);

// # Safety
// `cert` must be a live handle.
double tv_certificate_depth(const struct TvCertificate *cert);

// Copies the witness into `buf` when `len` covers it. Returns the witness
// dimension, or 0 for a null handle.
//
// # Safety
// `cert` must be a live handle; `buf` must hold `len` writable doubles.
size_t tv_certificate_witness(const struct TvCertificate *cert, double *buf, size_t len);

// Certificate document as JSON. Release with [`tv_string_free`].
//
// # Safety
// `cert` must be a live handle; `out` must be writable.
enum TvStatus tv_certificate_json(const struct TvCertificate *cert, char **out);

// # Safety
// `s` must be null or a string returned by this library.
void tv_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TVERBERG_H */
