/*
 * hospstay C API.
 *
 * Every object is an opaque handle created by a *_create / *_read / factory
 * call and released with the matching *_destroy. Functions that can fail
 * return an hs_status; on failure hs_last_error() describes the problem for
 * the calling thread. Strings returned through char** out-parameters are
 * owned by the caller and released with hs_string_free().
 */
#ifndef HOSPSTAY_H
#define HOSPSTAY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HOSPSTAY_BUILDING)
#    define HS_API __declspec(dllexport)
#  else
#    define HS_API __declspec(dllimport)
#  endif
#else
#  define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hs_status {
  HS_OK = 0,
  HS_ERR_INVALID_ARGUMENT = 1, /* bad parameter or configuration */
  HS_ERR_DATA = 2,             /* input data cannot support the request */
  HS_ERR_IO = 3,               /* file could not be read or written */
  HS_ERR_NUMERIC = 4,          /* non-finite result */
  HS_ERR_INTERNAL = 5
} hs_status;

typedef enum hs_sex { HS_SEX_UNKNOWN = -1, HS_SEX_MALE = 0, HS_SEX_FEMALE = 1, HS_SEX_ANY = 2 } hs_sex;

typedef enum hs_estimator {
  HS_EST_KM = 0,
  HS_EST_KM_REDUCED = 1,
  HS_EST_EMPIRICAL = 2,
  HS_EST_NPMCM = 3,
  HS_EST_BERAN = 4,
  HS_EST_NPMCM_CONDITIONAL = 5
} hs_estimator;

typedef enum hs_kernel { HS_KERNEL_EPANECHNIKOV = 0, HS_KERNEL_GAUSSIAN = 1 } hs_kernel;

typedef enum hs_endpoint {
  HS_ENDPOINT_HW_TO_ICU = 0,
  HS_ENDPOINT_HW_DEATH = 1,
  HS_ENDPOINT_HW_DISCHARGE = 2,
  HS_ENDPOINT_ICU_DEATH = 3,
  HS_ENDPOINT_ICU_DISCHARGE = 4,
  HS_ENDPOINT_HOSPITAL_TOTAL = 5
} hs_endpoint;

typedef enum hs_format { HS_FORMAT_CSV = 0, HS_FORMAT_JSON = 1 } hs_format;

typedef enum hs_state { HS_STATE_HW = 0, HS_STATE_ICU = 1, HS_STATE_DEAD = 2, HS_STATE_DISCHARGED = 3 } hs_state;

/* Covariate point for the conditional estimators. bandwidth <= 0 selects the
 * rule-of-thumb bandwidth. */
typedef struct hs_covariate_query {
  double age;
  hs_sex sex;
  hs_kernel kernel;
  double bandwidth;
} hs_covariate_query;

typedef struct hs_fit_report {
  double shape;
  double scale;
  double sse;
  int iterations;
  int converged;
} hs_fit_report;

typedef struct hs_observations hs_observations;
typedef struct hs_curve hs_curve;
typedef struct hs_linelist hs_linelist;
typedef struct hs_sim_config hs_sim_config;
typedef struct hs_occupancy hs_occupancy;

HS_API const char* hs_version(void);
HS_API const char* hs_last_error(void);
HS_API void hs_string_free(char* s);

HS_API hs_status hs_parse_estimator(const char* name, hs_estimator* out);
HS_API hs_status hs_parse_endpoint(const char* name, hs_endpoint* out);
HS_API hs_status hs_parse_kernel(const char* name, hs_kernel* out);
HS_API hs_status hs_parse_sex(const char* name, hs_sex* out); /* male, female, any */

/* Observations. age < 0 (or NaN) and HS_SEX_UNKNOWN mark missing covariates. */
HS_API hs_status hs_observations_create(hs_observations** out);
HS_API hs_status hs_observations_add(hs_observations* obs, double time, int event, int known_cure,
                                     double age, hs_sex sex);
HS_API size_t hs_observations_size(const hs_observations* obs);
HS_API hs_status hs_observations_read_csv(const char* path, hs_observations** out);
HS_API hs_status hs_observations_to_csv(const hs_observations* obs, char** out);
HS_API hs_status hs_empirical_event_probability(const hs_observations* obs, double* out);
HS_API void hs_observations_destroy(hs_observations* obs);

/* Line lists. study_end is an ISO date (YYYY-MM-DD). */
HS_API hs_status hs_linelist_read_csv(const char* path, hs_linelist** out);
HS_API size_t hs_linelist_size(const hs_linelist* list);
HS_API size_t hs_linelist_rejected_count(const hs_linelist* list);
/* "row N, column C: message"; index < rejected count. Owned by the list. */
HS_API const char* hs_linelist_rejected(const hs_linelist* list, size_t index);
HS_API hs_status hs_linelist_derive(const hs_linelist* list, hs_endpoint endpoint,
                                    const char* study_end, hs_observations** out);
HS_API hs_status hs_linelist_summary_json(const hs_linelist* list, const char* study_end,
                                          char** out);
HS_API void hs_linelist_destroy(hs_linelist* list);

/* Survival curves. query may be NULL for the unconditional estimators. */
HS_API hs_status hs_estimate(const hs_observations* obs, hs_estimator estimator,
                             const hs_covariate_query* query, hs_curve** out);
HS_API hs_status hs_curve_read_csv(const char* path, hs_curve** out);
HS_API hs_status hs_curve_latency(const hs_curve* curve, double* p, hs_curve** latency);
HS_API double hs_curve_evaluate(const hs_curve* curve, double t);
HS_API double hs_curve_plateau(const hs_curve* curve);
HS_API double hs_curve_event_probability(const hs_curve* curve);
HS_API size_t hs_curve_jump_count(const hs_curve* curve);
HS_API hs_status hs_curve_jump(const hs_curve* curve, size_t index, double* t, double* s);
HS_API hs_status hs_curve_serialize(const hs_curve* curve, hs_format format, char** out);
/* As hs_curve_serialize, but the JSON form reports the given event
 * probability (e.g. the empirical ratio) instead of 1 - plateau. */
HS_API hs_status hs_curve_serialize_with_probability(const hs_curve* curve, hs_format format,
                                                     double event_probability, char** out);
HS_API void hs_curve_destroy(hs_curve* curve);

/* Weibull fitting. */
HS_API hs_status hs_fit_weibull(const hs_curve* curve, hs_fit_report* out);
HS_API hs_status hs_fit_report_json(const hs_fit_report* report, char** out);

/* Simulation configuration. */
HS_API hs_status hs_sim_config_default(hs_sim_config** out);
HS_API hs_status hs_sim_config_read_json(const char* path, hs_sim_config** out);
HS_API hs_status hs_sim_config_to_json(const hs_sim_config* config, char** out);
HS_API hs_status hs_sim_config_set_seed(hs_sim_config* config, uint64_t seed);
HS_API hs_status hs_sim_config_set_replications(hs_sim_config* config, int replications);
HS_API hs_status hs_sim_config_set_threads(hs_sim_config* config, int threads);
/* Fills transition and duration tables from a line list. query supplies the
 * kernel and bandwidth for the conditional tables and may be NULL. Warnings
 * (one per line) are returned through warnings when it is non-NULL. */
HS_API hs_status hs_sim_config_calibrate(hs_sim_config* config, const hs_linelist* list,
                                         const char* study_end, int conditional,
                                         const hs_covariate_query* query, char** warnings);
HS_API void hs_sim_config_destroy(hs_sim_config* config);

/* Simulation output. */
HS_API hs_status hs_simulate(const hs_sim_config* config, hs_occupancy** out);
HS_API hs_status hs_occupancy_read_csv(const char* path, hs_occupancy** out);
HS_API int hs_occupancy_days(const hs_occupancy* occupancy);
HS_API double hs_occupancy_mean(const hs_occupancy* occupancy, hs_state state, int day);
HS_API hs_status hs_occupancy_to_csv(const hs_occupancy* occupancy, char** out);
HS_API hs_status hs_occupancy_metadata_json(const hs_occupancy* occupancy, char** out);
HS_API hs_status hs_capacity_csv(const hs_occupancy* occupancy, int hw_first, int hw_last,
                                 int icu_first, int icu_last, char** out);
HS_API void hs_occupancy_destroy(hs_occupancy* occupancy);

/* Runs both configurations and returns the per-day mean differences
 * (conditional minus unconditional), the side-by-side capacity table and a
 * JSON summary. Any out-parameter may be NULL. */
HS_API hs_status hs_compare(const hs_sim_config* unconditional, const hs_sim_config* conditional,
                            int hw_first, int hw_last, int icu_first, int icu_last,
                            char** difference_csv, char** capacity_csv, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* HOSPSTAY_H */
