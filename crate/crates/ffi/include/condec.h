#ifndef CONDEC_H
#define CONDEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CondecEngine {
  CONDEC_ENGINE_BAKER = 0,
  CONDEC_ENGINE_DP = 1,
  CONDEC_ENGINE_BRUTE = 2,
} CondecEngine;

typedef enum CondecProblem {
  CONDEC_PROBLEM_OCT = 0,
  CONDEC_PROBLEM_EB = 1,
} CondecProblem;

typedef enum CondecStatus {
  CONDEC_STATUS_OK = 0,
  CONDEC_STATUS_NULL_POINTER = 1,
  CONDEC_STATUS_INVALID_ARGUMENT = 2,
  CONDEC_STATUS_PARSE = 3,
  CONDEC_STATUS_NON_PLANAR = 4,
  CONDEC_STATUS_INTERNAL = 5,
  CONDEC_STATUS_PANIC = 6,
} CondecStatus;

/*
 Opaque graph handle.
 */
typedef struct CondecGraph CondecGraph;

/*
 Opaque result of a solve call. A NO answer is a valid solution handle
 with `feasible == false`.
 */
typedef struct CondecSolution CondecSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer
 stays valid until the next call into the library on the same thread.
 */
const char *condec_last_error_message(void);

/*
 Graph with vertices `0..n` and no edges.

 # Safety
 `out` must be writable.
 */
enum CondecStatus condec_graph_new(uintptr_t n, struct CondecGraph **out);

/*
 Parses the text graph format (header `n m`, edge lines, optional
 `apex:`, `rot` and `marked_faces:` lines).

 # Safety
 `text` must be a nul-terminated string.
 */
enum CondecStatus condec_graph_parse(const char *text, struct CondecGraph **out);

/*
 # Safety
 `g` must come from this library and not be used afterwards.
 */
void condec_graph_free(struct CondecGraph *g);

/*
 # Safety
 `g` must be a live graph handle.
 */
enum CondecStatus condec_graph_add_edge(struct CondecGraph *g, uintptr_t u, uintptr_t v);

/*
 Vertex count, or 0 for a null handle.

 # Safety
 `g` must be null or a live graph handle.
 */
uintptr_t condec_graph_num_vertices(const struct CondecGraph *g);

/*
 Edge count, or 0 for a null handle.

 # Safety
 `g` must be null or a live graph handle.
 */
uintptr_t condec_graph_num_edges(const struct CondecGraph *g);

/*
 Width of the min-fill heuristic decomposition.

 # Safety
 `g` must be a live graph handle and `width` writable.
 */
enum CondecStatus condec_heuristic_width(const struct CondecGraph *g, uintptr_t *width);

/*
 Minimum solution of size at most `k` over all vertices (OCT) or edges
 (EB). `threads` applies to the Baker engine; 0 picks the default.

 # Safety
 `g` must be a live graph handle and `out` writable.
 */
enum CondecStatus condec_solve(const struct CondecGraph *g,
                               enum CondecProblem problem,
                               uintptr_t k,
                               enum CondecEngine engine,
                               uintptr_t threads,
                               struct CondecSolution **out);

/*
 # Safety
 `s` must come from [`condec_solve`] and not be used afterwards.
 */
void condec_solution_free(struct CondecSolution *s);

/*
 # Safety
 `s` must be null or a live solution handle.
 */
bool condec_solution_feasible(const struct CondecSolution *s);

/*
 Number of deleted vertices or edges; 0 when infeasible.

 # Safety
 `s` must be null or a live solution handle.
 */
uintptr_t condec_solution_size(const struct CondecSolution *s);

/*
 # Safety
 `s` must be null or a live solution handle.
 */
uintptr_t condec_solution_pairs_tried(const struct CondecSolution *s);

/*
 # Safety
 `s` must be null or a live solution handle.
 */
uintptr_t condec_solution_max_width(const struct CondecSolution *s);

/*
 Copies the deleted items into `buf`: vertex ids for OCT, endpoint pairs
 `u0 v0 u1 v1 ...` for EB. `written` receives the number of values the
 full answer needs; a short buffer gives `INVALID_ARGUMENT` with nothing
 copied.

 # Safety
 `s` must be a live solution handle, `buf` valid for `len` writes (or null
 with `len == 0`) and `written` writable.
 */
enum CondecStatus condec_solution_items(const struct CondecSolution *s,
                                        uintptr_t *buf,
                                        uintptr_t len,
                                        uintptr_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONDEC_H */
