/*
 * galmono - numerical Galois/monodromy groups of minimal problems.
 *
 * C interface to the analysis pipeline: pick a problem from the catalog,
 * run monodromy loops over a random seed, and read back a JSON report of
 * the resulting permutation group (order, block systems, deck group).
 *
 * All handles are opaque; strings returned through char** out-parameters
 * are heap-allocated and must be released with gm_string_free.
 */

#ifndef GALMONO_GALMONO_H
#define GALMONO_GALMONO_H

#include <stdint.h>

#if defined(_WIN32)
#define GM_API __declspec(dllexport)
#else
#define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
  GM_OK = 0,
  GM_ERROR = 1,              /* unspecified failure; see error message */
  GM_FIBER_INCOMPLETE = 2,   /* could not reach the expected degree */
  GM_TOO_MANY_DISCARDS = 3,  /* >90% of monodromy loops discarded */
  GM_EXPECT_MISMATCH = 4,    /* report disagrees with catalog expectations */
  GM_UNKNOWN_PROBLEM = 5,
  GM_INVALID_ARGUMENT = 6,
  GM_NEEDS_ALLOW_LONG = 7,   /* long-running problem without allow_long */
  GM_DEGENERATE_SAMPLE = 8,
  GM_NUMERICAL_ERROR = 9
} gm_status;

typedef struct gm_options {
  uint64_t seed;       /* drives every random choice of the analysis */
  int32_t loops;       /* monodromy permutations to harvest; <=0 -> 24 */
  int32_t threads;     /* worker cap; <=0 -> hardware, capped by
                          GALMONO_THREADS */
  int32_t verify_deck; /* nonzero: verify closed-form deck maps */
  int32_t allow_long;  /* nonzero: permit long-running problems */
  int32_t stabilize;   /* nonzero: stop early once the group order is
                          unchanged for 5 accepted loops */
  /* tracker overrides; values <= 0 keep the defaults */
  double initial_step;
  double min_step;
  double max_step;
  double corrector_tol;
  int32_t max_steps;
} gm_options;

typedef struct gm_analysis gm_analysis;

/* Fills an options struct with defaults (seed 0, 24 loops, auto threads). */
GM_API void gm_options_init(gm_options* opts);

GM_API const char* gm_version(void);

/* Catalog access. Problem indices are stable within a library version. */
GM_API int gm_problem_count(void);
GM_API const char* gm_problem_id(int index); /* NULL when out of range */
GM_API gm_status gm_problem_info_json(const char* id, char** out_json);

/*
 * Runs the full analysis. On failure returns the mapped status and, when
 * error_message is non-NULL, a heap-allocated description.
 */
GM_API gm_status gm_analyze(const char* problem_id, const gm_options* opts,
                            gm_analysis** out, char** error_message);

/* Canonical report document; replays with the same options byte-match. */
GM_API gm_status gm_analysis_json(const gm_analysis* a, char** out_json);
/* 1 when degree/order/parity/blocks/deck order match the catalog, else 0. */
GM_API int gm_analysis_matches_expected(const gm_analysis* a);
/* JSON array of human-readable mismatch descriptions (empty on match). */
GM_API gm_status gm_analysis_mismatches_json(const gm_analysis* a, char** out_json);
/* Wall-clock seconds of the run; not part of the canonical JSON. */
GM_API double gm_analysis_wall_seconds(const gm_analysis* a);

GM_API void gm_analysis_free(gm_analysis* a);
GM_API void gm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* GALMONO_GALMONO_H */
