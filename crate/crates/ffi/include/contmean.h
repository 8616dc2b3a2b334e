/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CONTMEAN_H
#define CONTMEAN_H

#include <stddef.h>
#include <stdint.h>

// Result code of every call.
typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_UTF8 = 2,
  CM_STATUS_PARSE = 3,
  CM_STATUS_INVALID_GRAPH = 4,
  CM_STATUS_INVALID_ARGUMENT = 5,
  CM_STATUS_WRONG_CLASS = 6,
  CM_STATUS_CAP_EXCEEDED = 7,
  CM_STATUS_PANIC = 8,
} CmStatus;

// Pair-mean engine for the generic calls.
typedef enum CmBackend {
  CM_BACKEND_SPT = 0,
  CM_BACKEND_ROOF = 1,
} CmBackend;

// Opaque graph handle.
typedef struct CmGraph CmGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses an edge list or JSON document into a new graph handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer. The
// handle must be released with [`cm_graph_free`].
enum CmStatus cm_graph_from_text(const char *text, struct CmGraph **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `g` must come from [`cm_graph_from_text`] and not be used afterwards.
void cm_graph_free(struct CmGraph *g);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_graph_vertex_count(const struct CmGraph *g, size_t *out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_graph_edge_count(const struct CmGraph *g, size_t *out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_continuous_mean(const struct CmGraph *g, enum CmBackend backend, double *out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_discrete_mean(const struct CmGraph *g, double *out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_wiener_index(const struct CmGraph *g, double *out);

// Mean distance between the points of edges `e` and `f`.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_pair_mean(const struct CmGraph *g,
                           size_t e,
                           size_t f,
                           enum CmBackend backend,
                           double *out);

// Linear-time mean of a tree.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_tree_mean(const struct CmGraph *g, double *out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CmStatus cm_cactus_mean(const struct CmGraph *g, double *out);

// Mean of the complete graph on `n` vertices with every edge of `length`.
//
// # Safety
// `out` must be a valid pointer.
enum CmStatus cm_complete_uniform_mean(size_t n, double length, double *out);

// Message for the last failed call on this thread, or null. Valid until
// the next call on the same thread.
const char *cm_last_error_message(void);

// Library version as a static string.
const char *cm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTMEAN_H */
