/*
 * C interface to the groupform engine.
 *
 * Objects are opaque handles created by *_load / *_generate / *_run calls and
 * released with the matching *_free. Every fallible call returns a
 * gf_status; on failure a human-readable message is available from
 * gf_last_error() on the same thread until the next call into the library.
 * Strings returned through char** out-parameters are owned by the caller and
 * must be released with gf_string_free().
 */
#ifndef GROUPFORM_H
#define GROUPFORM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GROUPFORM_BUILDING)
#    define GF_API __declspec(dllexport)
#  else
#    define GF_API __declspec(dllimport)
#  endif
#else
#  define GF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as the CLI's process exit codes. */
typedef enum gf_status {
    GF_OK = 0,
    GF_ERR_USAGE = 1,
    GF_ERR_VALIDATION = 2,
    GF_ERR_NOT_CONVERGED = 3,
    GF_ERR_NOT_ISE = 4,
    GF_ERR_IO = 5,
    GF_ERR_INTEGRITY = 6,
    GF_ERR_INTERNAL = 7
} gf_status;

typedef struct gf_scenario gf_scenario;
typedef struct gf_trace gf_trace;
typedef struct gf_sweep gf_sweep;

typedef struct gf_agent {
    size_t id;
    size_t category;
    double resource;
    double x;
    double y;
} gf_agent;

typedef struct gf_config {
    size_t k;
    double lambda;
} gf_config;

typedef struct gf_scenario_params {
    size_t m;
    size_t k;
    double x_max;
    double y_max;
    double r_max;
    uint64_t seed;
    int integer_resources;
} gf_scenario_params;

typedef struct gf_sweep_params {
    const double* x_max_list;
    size_t x_max_count;
    const double* r_max_list;
    size_t r_max_count;
    size_t replications;
    uint64_t base_seed;
    size_t m;
    gf_config config;
    int integer_resources;
    uint64_t max_iterations;      /* 0: 10 n (n + 1) */
    uint64_t iteration_threshold; /* attempts counted as "fast" convergence */
    size_t threads;               /* 0: hardware concurrency */
} gf_sweep_params;

typedef struct gf_render_spec {
    const uint64_t* iterations; /* ignored when keyframes != 0 */
    size_t iteration_count;
    int keyframes;
    int canvas;
    int legend;
} gf_render_spec;

GF_API const char* gf_version(void);
GF_API const char* gf_last_error(void);
GF_API void gf_string_free(char* s);

GF_API gf_config gf_config_default(void);
GF_API gf_scenario_params gf_scenario_params_default(void);
GF_API gf_sweep_params gf_sweep_params_default(void);
GF_API gf_render_spec gf_render_spec_default(void);

/* Scenarios */
GF_API gf_status gf_scenario_load(const char* path, gf_scenario** out);
GF_API gf_status gf_scenario_parse(const char* text, gf_scenario** out);
GF_API gf_status gf_scenario_generate(const gf_scenario_params* params, gf_scenario** out);
GF_API gf_status gf_scenario_save(const gf_scenario* scenario, const char* path);
GF_API size_t gf_scenario_size(const gf_scenario* scenario);
GF_API size_t gf_scenario_k(const gf_scenario* scenario);
GF_API gf_status gf_scenario_agent(const gf_scenario* scenario, size_t index, gf_agent* out);
GF_API gf_status gf_scenario_digest(const gf_scenario* scenario, char** out);
GF_API void gf_scenario_free(gf_scenario* scenario);

/* Group evaluation over agent ids of a scenario. */
GF_API gf_status gf_group_log_utility(const gf_scenario* scenario, const gf_config* config,
                                      const size_t* members, size_t count, double* out);
GF_API gf_status gf_boosting_factor(const double* totals, size_t k, double* out);

/* Simulation. Returns GF_OK whether or not the run converged; query
 * gf_trace_converged for the outcome. */
GF_API gf_status gf_simulate(const gf_scenario* scenario, const gf_config* config, uint64_t seed,
                             uint64_t max_iterations, gf_trace** out);
GF_API gf_status gf_trace_load(const char* path, gf_trace** out);
GF_API gf_status gf_trace_save(const gf_trace* trace, const char* path);
GF_API int gf_trace_converged(const gf_trace* trace);
GF_API uint64_t gf_trace_iterations(const gf_trace* trace);
GF_API uint64_t gf_trace_seed(const gf_trace* trace);
/* Final partition as a partition-file JSON document. */
GF_API gf_status gf_trace_final_partition_json(const gf_trace* trace, char** out);
GF_API gf_status gf_trace_metrics_json(const gf_trace* trace, char** out);
/* Copy of the scenario embedded in a trace. */
GF_API gf_status gf_trace_scenario(const gf_trace* trace, gf_scenario** out);
/* Re-runs the engine from the trace header and checks that it reproduces the
 * recorded events. When `scenario` is non-null its digest must match the
 * trace. Writes a JSON report; returns GF_ERR_INTEGRITY on any mismatch. */
GF_API gf_status gf_trace_replay(const gf_trace* trace, const gf_scenario* scenario, char** report);
GF_API void gf_trace_free(gf_trace* trace);

/* Equilibrium verification. `partition_path` may be a partition file or a
 * trace file (its final partition is used). Writes an ISE report as JSON and
 * sets *is_ise. */
GF_API gf_status gf_verify_file(const gf_scenario* scenario, const gf_config* config,
                                const char* partition_path, char** report, int* is_ise);
GF_API gf_status gf_verify_partition_json(const gf_scenario* scenario, const gf_config* config,
                                          const char* partition_json, char** report, int* is_ise);

/* Rendering: one SVG file per selected iteration in out_dir. */
GF_API gf_status gf_render(const gf_trace* trace, const gf_render_spec* spec, const char* out_dir,
                           size_t* frames_written);

/* Parameter sweep. */
GF_API gf_status gf_sweep_run(const gf_sweep_params* params, gf_sweep** out);
GF_API gf_status gf_sweep_csv(const gf_sweep* sweep, char** out);
GF_API gf_status gf_sweep_json(const gf_sweep* sweep, char** out);
GF_API gf_status gf_sweep_trend_report(const gf_sweep* sweep, char** out);
GF_API void gf_sweep_free(gf_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif /* GROUPFORM_H */
