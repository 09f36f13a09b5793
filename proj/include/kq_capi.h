#ifndef KQ_CAPI_H
#define KQ_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define KQ_API __declspec(dllexport)
#else
#define KQ_API __attribute__((visibility("default")))
#endif

/* Status codes; KQ_CONFIG_ERROR and KQ_INVARIANT_VIOLATION equal the CLI exit codes. */
typedef enum {
    KQ_OK = 0,
    KQ_INVALID_ARGUMENT = 1,
    KQ_CONFIG_ERROR = 2,
    KQ_INVARIANT_VIOLATION = 3,
    KQ_PRECONDITION = 4,
    KQ_INTERNAL_ERROR = 5
} kq_status;

typedef struct kq_config kq_config;
typedef struct kq_result kq_result;

KQ_API const char *kq_version(void);

/* Message of the last failed call on the calling thread ("" if none); valid until the next API call on that thread. */
KQ_API const char *kq_last_error(void);

/* Run configuration (JSON document, schema in the README). */
KQ_API kq_status kq_config_load_file(const char *path, kq_config **out);
KQ_API kq_status kq_config_load_string(const char *json, kq_config **out);
KQ_API kq_status kq_config_set_backend(kq_config *cfg, const char *name); /* "exact" | "shots" | "noisy" */
KQ_API kq_status kq_config_set_shots(kq_config *cfg, int shots);
KQ_API kq_status kq_config_set_seed(kq_config *cfg, uint64_t seed);
KQ_API kq_status kq_config_set_threads(kq_config *cfg, int threads);
KQ_API const char *kq_config_prefix(const kq_config *cfg);
KQ_API void kq_config_free(kq_config *cfg);

/* Runs "sweep", "diagram", "spectrum" or "verify". Results hold named text artifacts (CSV, JSON, reports)
   and a human-readable summary. A verify run that finds a violation returns KQ_INVARIANT_VIOLATION and
   still fills *out. cfg may be NULL for "verify". */
KQ_API kq_status kq_run(const kq_config *cfg, const char *command, kq_result **out);
KQ_API size_t kq_result_artifact_count(const kq_result *res);
KQ_API const char *kq_result_artifact_name(const kq_result *res, size_t i);
KQ_API const char *kq_result_artifact_data(const kq_result *res, size_t i);
KQ_API const char *kq_result_summary(const kq_result *res);
KQ_API void kq_result_free(kq_result *res);

/* SVG chart for a CSV table produced by kq_run; free the string with kq_string_free. */
KQ_API kq_status kq_plot_svg(const char *csv, char **svg_out);

/* Ground-state preparation circuit of a model as JSON ("chain" or "honeycomb" cluster; enforce_ph selects the
   symmetry-enforced bond-fermion circuit with momentum shift dk). Free with kq_string_free. */
KQ_API kq_status kq_circuit_json(const char *lattice, int n_sites, double jx, double jy, double jz, int enforce_ph, double dk, char **json_out);

KQ_API void kq_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif
