#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modal/modes.hpp"
#include "modal/oracle.hpp"
#include "modal/supervisor.hpp"

namespace modal {

inline constexpr int kTraceSchemaVersion = 1;

/// One supervised system at one step.
struct TraceRecord {
  std::size_t step = 0;
  double time = 0.0;
  std::string system;
  /// Mode at the start of the step, and after the decision.
  std::string mode;
  std::string next_mode;
  std::map<std::string, double> scores;
  /// point | partiality | contradiction
  std::string outcome;
  std::map<std::string, double> point;
  std::vector<std::string> support;
  /// stay | transition | degraded | alarm | merged
  std::string decision;
  std::string target;
  std::vector<std::string> undefined;
  /// "<priority>:<kind>:<target>" for each query raised this step.
  std::vector<std::string> queries;
  /// Non-normal quality flags observed this step, as "<flag>:<target>".
  std::vector<std::string> flags;
  /// Picture after the step; nullopt marks an Undefined variable.
  std::map<std::string, std::optional<double>> state;
  /// Ground truth of the simulated physics after the step.
  std::map<std::string, double> truth;
  std::vector<std::string> events;

  bool operator==(const TraceRecord&) const = default;
};

struct TraceHeader {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double p_low = 0.0;
  double p_high = 0.0;

  bool operator==(const TraceHeader&) const = default;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRecord> records;

  bool operator==(const Trace&) const = default;
};

/// Line-delimited records: a header line with the schema version, then one
/// object per record with a fixed field order.
std::string to_structured(const Trace& trace);
/// Throws Error(ParseError) on malformed input or an unsupported version.
Trace parse_structured(std::string_view text);
/// Fixed-width table for humans.
std::string to_text_table(const Trace& trace);

std::string describe(const QueryTask& task);

/// Fills the decision/outcome/score fields of a record from a supervisor step.
void record_step(TraceRecord& record, const ModeId& mode_before, const StepResult& result);
void record_state(TraceRecord& record, const ModeState& state);

struct TraceSummary {
  std::map<std::string, std::map<std::string, std::size_t>> occupancy;
  std::size_t transitions = 0;
  std::size_t degraded = 0;
  std::size_t alarms = 0;
  std::size_t partiality = 0;
  std::size_t contradiction = 0;
  std::size_t merged_steps = 0;
  /// Non-stay decisions taken while the current mode scored above p_high.
  std::size_t hysteresis_violations = 0;
  /// Ordinary transitions into a mode scoring at or below p_low.
  std::size_t guard_violations = 0;
  /// Named safety properties and their verdicts.
  std::map<std::string, bool> verdicts;
};

TraceSummary summarize(const Trace& trace);
std::string format_summary(const TraceSummary& summary);

}  // namespace modal
