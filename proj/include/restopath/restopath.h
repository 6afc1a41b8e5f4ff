/*
 * restopath C API.
 *
 * Scenarios are opaque immutable handles. Reports, traces and events are
 * exchanged as JSON text. Every string returned through a char** belongs to
 * the caller and is released with rp_string_free().
 */
#ifndef RESTOPATH_H
#define RESTOPATH_H

#include <stddef.h>

#if defined(RESTOPATH_BUILDING_LIBRARY)
#define RP_API __attribute__((visibility("default")))
#else
#define RP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rp_status {
    RP_OK = 0,
    RP_ERR_ARGUMENT = 1,   /* null pointer or out-of-range option */
    RP_ERR_PARSE = 2,      /* malformed JSON or a field of the wrong type */
    RP_ERR_VALIDATION = 3, /* well-formed input that breaks an invariant */
    RP_ERR_UNSOLVABLE = 4, /* unreachable target, nothing energized */
    RP_ERR_SOLVER = 5,     /* numerical failure in the MILP or power flow */
    RP_ERR_INTERNAL = 6
} rp_status;

typedef struct rp_scenario rp_scenario;

typedef struct rp_progress {
    int iteration;
    int schemes_found;
    int valid_found;
    int max_schemes;
    double last_objective_mvar;
} rp_progress;

/* Return nonzero to cancel the search; the partial trace is still reported. */
typedef int (*rp_progress_fn)(const rp_progress* progress, void* user);

typedef struct rp_solve_options {
    int max_schemes;       /* 0 keeps the scenario's M_S */
    int d_max;             /* 0 keeps the scenario's value */
    double k1;             /* 0 keeps */
    double lambda;         /* 0 keeps */
    int has_weights;
    double weights[5];
    const int* targets;    /* used when has_targets is nonzero */
    size_t n_targets;
    int has_targets;
    int check_depth;
    int check_reactive;
    int check_voltage;
    long node_limit;       /* per MILP solve */
    rp_progress_fn progress;
    void* progress_user;
} rp_solve_options;

RP_API const char* rp_version(void);
RP_API const char* rp_status_string(rp_status status);

/* Message of the last failed call on this thread, "" when none. */
RP_API const char* rp_last_error(void);

RP_API void rp_string_free(char* text);

/* Defaults: keep every scenario parameter, all checks on, node limit 2e6. */
RP_API void rp_solve_options_init(rp_solve_options* options);

/* Fills options from a JSON solve request ({"targets", "k", "dmax", "k1",
 * "lambda", "weights", "check_*", "node_limit"}). The targets array is
 * owned by the library until rp_solve_options_release(). */
RP_API rp_status rp_solve_options_from_json(const char* request_json, rp_solve_options* options);
RP_API void rp_solve_options_release(rp_solve_options* options);

RP_API rp_status rp_scenario_from_json(const char* document, rp_scenario** out);
RP_API rp_status rp_scenario_to_json(const rp_scenario* scenario, char** out_document);
RP_API void rp_scenario_free(rp_scenario* scenario);

/* New scenario after one restoration event; the input is unchanged. */
RP_API rp_status rp_scenario_apply_event(const rp_scenario* scenario, const char* event_json,
                                         rp_scenario** out);

/* Energized islands as a JSON array of sorted bus-id arrays. */
RP_API rp_status rp_scenario_islands(const rp_scenario* scenario, char** out_json);

/* Checks the options against the scenario (targets, parameter ranges)
 * without solving. */
RP_API rp_status rp_check_options(const rp_scenario* scenario, const rp_solve_options* options);

/* Enumerate, check and rank. valid_count may be null. */
RP_API rp_status rp_solve(const rp_scenario* scenario, const rp_solve_options* options,
                          char** out_report, int* valid_count);

/* Rank a trace (or a report holding one) without searching. */
RP_API rp_status rp_evaluate(const rp_scenario* scenario, const char* trace_json,
                             const rp_solve_options* options, char** out_report, int* valid_count);

/* Fixed-width text summary of a report. */
RP_API rp_status rp_report_table(const char* report_json, char** out_text);

/* LP-format dump of the first path-model iteration. */
RP_API rp_status rp_export_lp(const rp_scenario* scenario, const rp_solve_options* options,
                              char** out_text);

#ifdef __cplusplus
}
#endif

#endif
