#include "modal/modal.h"

#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modal/error.hpp"
#include "modal/modes.hpp"
#include "modal/nerve.hpp"
#include "modal/oracle.hpp"
#include "modal/scenario_file.hpp"
#include "modal/scenarios.hpp"
#include "modal/trace.hpp"

struct modal_nerve {
  modal::Nerve nerve;
};

struct modal_outcome {
  modal_outcome_kind kind;
  std::vector<std::string> modes;
  std::vector<double> values;
};

struct modal_report {
  modal::ValidationReport report;
};

struct modal_scenario {
  modal::Scenario scenario;
};

struct modal_run {
  modal::Trace trace;
  modal::TraceSummary summary;
  std::string summary_text;
  std::optional<std::string> table;
  std::optional<std::string> structured;
};

namespace {

thread_local std::string last_error;

modal_status status_of(modal::ErrorCode code) {
  using modal::ErrorCode;
  switch (code) {
    case ErrorCode::ParseError: return MODAL_ERR_PARSE;
    case ErrorCode::MissingScore: return MODAL_ERR_MISSING_SCORE;
    case ErrorCode::UnknownMode: return MODAL_ERR_UNKNOWN_MODE;
    case ErrorCode::Io: return MODAL_ERR_IO;
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidThresholds:
    case ErrorCode::DuplicateVertexName:
    case ErrorCode::InvalidModeId:
    case ErrorCode::InvalidChartCount: return MODAL_ERR_CONFIG;
    default: return MODAL_ERR_INVALID_ARGUMENT;
  }
}

template <typename F>
modal_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MODAL_OK;
  } catch (const modal::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return MODAL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return MODAL_ERR_INTERNAL;
  }
}

modal_status null_argument(const char* name) {
  last_error = std::string(name) + " must not be null";
  return MODAL_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* modal_version(void) { return "0.1.0"; }

const char* modal_status_name(modal_status status) {
  switch (status) {
    case MODAL_OK: return "ok";
    case MODAL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MODAL_ERR_PARSE: return "parse error";
    case MODAL_ERR_CONFIG: return "invalid configuration";
    case MODAL_ERR_MISSING_SCORE: return "missing score";
    case MODAL_ERR_UNKNOWN_MODE: return "unknown mode";
    case MODAL_ERR_IO: return "i/o error";
    case MODAL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* modal_last_error(void) { return last_error.c_str(); }

modal_status modal_nerve_parse(const char* json, modal_nerve** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new modal_nerve{modal::parse_nerve(json)}; });
}

void modal_nerve_free(modal_nerve* nerve) { delete nerve; }

size_t modal_nerve_vertex_count(const modal_nerve* nerve) {
  return nerve ? nerve->nerve.vertices().size() : 0;
}

size_t modal_nerve_simplex_count(const modal_nerve* nerve, size_t dimension) {
  return nerve ? nerve->nerve.count(dimension) : 0;
}

modal_status modal_nerve_is_simplex(const modal_nerve* nerve, const char* const* modes,
                                    size_t count, int* out) {
  if (!nerve) return null_argument("nerve");
  if (!out || (count && !modes)) return null_argument("modes/out");
  return guarded([&] {
    modal::ModeSet set;
    for (size_t i = 0; i < count; ++i) set.insert(modal::ModeId(modes[i] ? modes[i] : ""));
    *out = nerve->nerve.is_simplex(set) ? 1 : 0;
  });
}

modal_status modal_nerve_edge_distance(const modal_nerve* nerve, const char* from, const char* to,
                                       long* out) {
  if (!nerve) return null_argument("nerve");
  if (!from || !to || !out) return null_argument("from/to/out");
  return guarded([&] {
    auto d = nerve->nerve.edge_distance(modal::ModeId(from), modal::ModeId(to));
    *out = d ? static_cast<long>(*d) : -1;
  });
}

modal_status modal_classify(const modal_nerve* nerve, const char* scores_json, double p_low,
                            double p_high, modal_outcome** out) {
  if (!nerve) return null_argument("nerve");
  if (!scores_json || !out) return null_argument("scores_json/out");
  return guarded([&] {
    const modal::ScoreVector scores = modal::parse_scores(scores_json);
    const modal::Thresholds thresholds(p_low, p_high);
    const modal::ClassificationOutcome outcome = modal::classify(scores, thresholds, nerve->nerve);
    auto result = std::make_unique<modal_outcome>();
    if (const auto* p = std::get_if<modal::PointOutcome>(&outcome)) {
      result->kind = MODAL_OUTCOME_POINT;
      for (const auto& [m, t] : p->point.coords()) {
        result->modes.push_back(m.name());
        result->values.push_back(t);
      }
    } else if (const auto* q = std::get_if<modal::PartialityOutcome>(&outcome)) {
      result->kind = MODAL_OUTCOME_PARTIALITY;
      if (q->best) {
        result->modes.push_back(q->best->first.name());
        result->values.push_back(q->best->second);
      }
    } else {
      const auto& c = std::get<modal::ContradictionOutcome>(outcome);
      result->kind = MODAL_OUTCOME_CONTRADICTION;
      for (const auto& m : c.support) {
        result->modes.push_back(m.name());
        result->values.push_back(c.scores.at(m));
      }
    }
    *out = result.release();
  });
}

modal_outcome_kind modal_outcome_kind_of(const modal_outcome* outcome) {
  return outcome ? outcome->kind : MODAL_OUTCOME_PARTIALITY;
}

size_t modal_outcome_size(const modal_outcome* outcome) { return outcome ? outcome->modes.size() : 0; }

const char* modal_outcome_mode(const modal_outcome* outcome, size_t index) {
  if (!outcome || index >= outcome->modes.size()) return nullptr;
  return outcome->modes[index].c_str();
}

double modal_outcome_value(const modal_outcome* outcome, size_t index) {
  if (!outcome || index >= outcome->values.size()) return 0.0;
  return outcome->values[index];
}

void modal_outcome_free(modal_outcome* outcome) { delete outcome; }

modal_status modal_scenario_validate(const char* json, modal_report** out) {
  if (!json || !out) return null_argument("json/out");
  return guarded([&] { *out = new modal_report{modal::validate_scenario(json)}; });
}

int modal_report_ok(const modal_report* report) { return report && report->report.ok() ? 1 : 0; }

size_t modal_report_error_count(const modal_report* report) {
  return report ? report->report.errors.size() : 0;
}

const char* modal_report_error(const modal_report* report, size_t index) {
  if (!report || index >= report->report.errors.size()) return nullptr;
  return report->report.errors[index].c_str();
}

size_t modal_report_warning_count(const modal_report* report) {
  return report ? report->report.warnings.size() : 0;
}

const char* modal_report_warning(const modal_report* report, size_t index) {
  if (!report || index >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[index].c_str();
}

void modal_report_free(modal_report* report) { delete report; }

modal_status modal_scenario_load(const char* json, modal_scenario** out) {
  if (!json || !out) return null_argument("json/out");
  return guarded([&] { *out = new modal_scenario{modal::load_scenario(json)}; });
}

void modal_scenario_free(modal_scenario* scenario) { delete scenario; }

const char* modal_scenario_kind(const modal_scenario* scenario) {
  return scenario ? scenario->scenario.kind.c_str() : nullptr;
}

modal_status modal_scenario_run(const modal_scenario* scenario, int override_seed, uint64_t seed,
                                size_t steps, modal_run** out) {
  if (!scenario) return null_argument("scenario");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto run = std::make_unique<modal_run>();
    run->trace = modal::run_scenario(
        scenario->scenario, override_seed ? std::optional<uint64_t>(seed) : std::nullopt,
        steps ? std::optional<size_t>(steps) : std::nullopt);
    run->summary = modal::summarize(run->trace);
    run->summary_text = modal::format_summary(run->summary);
    *out = run.release();
  });
}

const char* modal_run_trace(modal_run* run, modal_trace_format format) {
  if (!run) return nullptr;
  if (format == MODAL_FORMAT_STRUCTURED) {
    if (!run->structured) run->structured = modal::to_structured(run->trace);
    return run->structured->c_str();
  }
  if (!run->table) run->table = modal::to_text_table(run->trace);
  return run->table->c_str();
}

const char* modal_run_summary(const modal_run* run) { return run ? run->summary_text.c_str() : nullptr; }

size_t modal_run_alarm_count(const modal_run* run) { return run ? run->summary.alarms : 0; }

int modal_run_all_safe(const modal_run* run) {
  if (!run) return 0;
  for (const auto& [name, ok] : run->summary.verdicts) {
    if (!ok) return 0;
  }
  return 1;
}

void modal_run_free(modal_run* run) { delete run; }

modal_status modal_assess(double predicted_lo, double predicted_hi, double measured_lo,
                          double measured_hi, double required_accuracy, int* consistent,
                          int* accurate) {
  if (!consistent || !accurate) return null_argument("consistent/accurate");
  return guarded([&] {
    const modal::Assessment a = modal::assess({predicted_lo, predicted_hi},
                                              {measured_lo, measured_hi}, required_accuracy);
    *consistent = a.consistent ? 1 : 0;
    *accurate = a.accurate ? 1 : 0;
  });
}

void modal_solar_eval(double w2, double w3, double out[4]) {
  if (!out) return;
  const auto s = modal::solar_eval(w2, w3);
  for (int i = 0; i < 4; ++i) out[i] = s[i];
}

}  // extern "C"
