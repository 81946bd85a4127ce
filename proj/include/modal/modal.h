/* C interface to the modal supervision library.
 *
 * Every function returning modal_status reports failures through the status
 * code; modal_last_error() then describes the most recent failure on the
 * calling thread. Handles are opaque and released with their _free function.
 * Strings returned by accessors stay valid until the owning handle is freed.
 */
#ifndef MODAL_H
#define MODAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MODAL_API __declspec(dllexport)
#else
#define MODAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum modal_status {
  MODAL_OK = 0,
  MODAL_ERR_INVALID_ARGUMENT = 1,
  MODAL_ERR_PARSE = 2,
  MODAL_ERR_CONFIG = 3,
  MODAL_ERR_MISSING_SCORE = 4,
  MODAL_ERR_UNKNOWN_MODE = 5,
  MODAL_ERR_IO = 6,
  MODAL_ERR_INTERNAL = 7
} modal_status;

typedef enum modal_outcome_kind {
  MODAL_OUTCOME_POINT = 0,
  MODAL_OUTCOME_PARTIALITY = 1,
  MODAL_OUTCOME_CONTRADICTION = 2
} modal_outcome_kind;

typedef enum modal_trace_format {
  MODAL_FORMAT_TEXT_TABLE = 0,
  MODAL_FORMAT_STRUCTURED = 1
} modal_trace_format;

typedef struct modal_nerve modal_nerve;
typedef struct modal_outcome modal_outcome;
typedef struct modal_report modal_report;
typedef struct modal_scenario modal_scenario;
typedef struct modal_run modal_run;

MODAL_API const char* modal_version(void);
MODAL_API const char* modal_status_name(modal_status status);
MODAL_API const char* modal_last_error(void);

/* Nerve declaration: {"vertices": [...], "simplices": [[...], ...]}, or any
 * object carrying such a declaration under "nerve". */
MODAL_API modal_status modal_nerve_parse(const char* json, modal_nerve** out);
MODAL_API void modal_nerve_free(modal_nerve* nerve);
MODAL_API size_t modal_nerve_vertex_count(const modal_nerve* nerve);
/* Number of simplices with dimension + 1 vertices. */
MODAL_API size_t modal_nerve_simplex_count(const modal_nerve* nerve, size_t dimension);
MODAL_API modal_status modal_nerve_is_simplex(const modal_nerve* nerve, const char* const* modes,
                                              size_t count, int* out);
/* Edge count of a shortest 1-skeleton path; -1 when unreachable. */
MODAL_API modal_status modal_nerve_edge_distance(const modal_nerve* nerve, const char* from,
                                                 const char* to, long* out);

/* Scores as a JSON object {"mode": score}. Fails with MODAL_ERR_MISSING_SCORE
 * when a vertex has no score. */
MODAL_API modal_status modal_classify(const modal_nerve* nerve, const char* scores_json,
                                      double p_low, double p_high, modal_outcome** out);
MODAL_API modal_outcome_kind modal_outcome_kind_of(const modal_outcome* outcome);
/* Point: coordinates; contradiction: support; partiality: best candidate (0 or 1 entry). */
MODAL_API size_t modal_outcome_size(const modal_outcome* outcome);
MODAL_API const char* modal_outcome_mode(const modal_outcome* outcome, size_t index);
/* Point: barycentric coordinate; otherwise the mode's score. */
MODAL_API double modal_outcome_value(const modal_outcome* outcome, size_t index);
MODAL_API void modal_outcome_free(modal_outcome* outcome);

/* Fails only with MODAL_ERR_PARSE; configuration problems land in the report. */
MODAL_API modal_status modal_scenario_validate(const char* json, modal_report** out);
MODAL_API int modal_report_ok(const modal_report* report);
MODAL_API size_t modal_report_error_count(const modal_report* report);
MODAL_API const char* modal_report_error(const modal_report* report, size_t index);
MODAL_API size_t modal_report_warning_count(const modal_report* report);
MODAL_API const char* modal_report_warning(const modal_report* report, size_t index);
MODAL_API void modal_report_free(modal_report* report);

MODAL_API modal_status modal_scenario_load(const char* json, modal_scenario** out);
MODAL_API void modal_scenario_free(modal_scenario* scenario);
MODAL_API const char* modal_scenario_kind(const modal_scenario* scenario);

/* seed/steps override the file values when override_seed / steps are non-zero. */
MODAL_API modal_status modal_scenario_run(const modal_scenario* scenario, int override_seed,
                                          uint64_t seed, size_t steps, modal_run** out);
MODAL_API const char* modal_run_trace(modal_run* run, modal_trace_format format);
/* Occupancy, transitions, exceptions and safety verdicts. */
MODAL_API const char* modal_run_summary(const modal_run* run);
MODAL_API size_t modal_run_alarm_count(const modal_run* run);
MODAL_API int modal_run_all_safe(const modal_run* run);
MODAL_API void modal_run_free(modal_run* run);

MODAL_API modal_status modal_assess(double predicted_lo, double predicted_hi, double measured_lo,
                                    double measured_hi, double required_accuracy,
                                    int* consistent, int* accurate);
MODAL_API void modal_solar_eval(double w2, double w3, double out[4]);

#ifdef __cplusplus
}
#endif

#endif /* MODAL_H */
