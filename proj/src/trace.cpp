#include "modal/trace.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "modal/error.hpp"

namespace modal {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSchemaName = "modal-trace";

template <typename Map>
ojson object_of(const Map& m) {
  ojson out = ojson::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

ojson to_json(const TraceRecord& r) {
  ojson j;
  j["step"] = r.step;
  j["time"] = r.time;
  j["system"] = r.system;
  j["mode"] = r.mode;
  j["next_mode"] = r.next_mode;
  j["scores"] = object_of(r.scores);
  j["outcome"] = r.outcome;
  j["point"] = object_of(r.point);
  j["support"] = r.support;
  j["decision"] = r.decision;
  j["target"] = r.target;
  j["undefined"] = r.undefined;
  j["queries"] = r.queries;
  j["flags"] = r.flags;
  ojson state = ojson::object();
  for (const auto& [k, v] : r.state) state[k] = v ? ojson(*v) : ojson(nullptr);
  j["state"] = std::move(state);
  j["truth"] = object_of(r.truth);
  j["events"] = r.events;
  return j;
}

template <typename T>
T field(const ojson& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCode::ParseError, std::string("trace field missing: ") + name);
  return j.at(name).get<T>();
}

std::map<std::string, double> number_map(const ojson& j, const char* name) {
  std::map<std::string, double> out;
  const ojson obj = field<ojson>(j, name);
  for (const auto& [k, v] : obj.items()) out.emplace(k, v.get<double>());
  return out;
}

TraceRecord record_from_json(const ojson& j) {
  TraceRecord r;
  r.step = field<std::size_t>(j, "step");
  r.time = field<double>(j, "time");
  r.system = field<std::string>(j, "system");
  r.mode = field<std::string>(j, "mode");
  r.next_mode = field<std::string>(j, "next_mode");
  r.scores = number_map(j, "scores");
  r.outcome = field<std::string>(j, "outcome");
  r.point = number_map(j, "point");
  r.support = field<std::vector<std::string>>(j, "support");
  r.decision = field<std::string>(j, "decision");
  r.target = field<std::string>(j, "target");
  r.undefined = field<std::vector<std::string>>(j, "undefined");
  r.queries = field<std::vector<std::string>>(j, "queries");
  r.flags = field<std::vector<std::string>>(j, "flags");
  const ojson state = field<ojson>(j, "state");
  for (const auto& [k, v] : state.items()) {
    r.state.emplace(k, v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  r.truth = number_map(j, "truth");
  r.events = field<std::vector<std::string>>(j, "events");
  return r;
}

std::string fmt_double(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

}  // namespace

std::string to_structured(const Trace& trace) {
  std::string out;
  ojson header;
  header["schema"] = kSchemaName;
  header["version"] = kTraceSchemaVersion;
  header["scenario"] = trace.header.scenario;
  header["seed"] = trace.header.seed;
  header["steps"] = trace.header.steps;
  header["p_low"] = trace.header.p_low;
  header["p_high"] = trace.header.p_high;
  out += header.dump();
  out += '\n';
  for (const auto& r : trace.records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

Trace parse_structured(std::string_view text) {
  Trace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        if (field<std::string>(j, "schema") != kSchemaName) {
          throw Error(ErrorCode::ParseError, "not a modal trace");
        }
        if (field<int>(j, "version") != kTraceSchemaVersion) {
          throw Error(ErrorCode::ParseError, "unsupported trace version");
        }
        trace.header.scenario = field<std::string>(j, "scenario");
        trace.header.seed = field<std::uint64_t>(j, "seed");
        trace.header.steps = field<std::size_t>(j, "steps");
        trace.header.p_low = field<double>(j, "p_low");
        trace.header.p_high = field<double>(j, "p_high");
        have_header = true;
      } else {
        trace.records.push_back(record_from_json(j));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "trace has no header");
  return trace;
}

std::string to_text_table(const Trace& trace) {
  std::ostringstream out;
  out << "# scenario " << trace.header.scenario << " seed " << trace.header.seed << " steps "
      << trace.header.steps << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-9s %-8s %-10s %-10s %-13s %-10s %s\n", "step",
                "time", "system", "mode", "next", "outcome", "decision", "flags");
  out << line;
  for (const auto& r : trace.records) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ",") + f;
    std::snprintf(line, sizeof line, "%-6zu %-9s %-8s %-10s %-10s %-13s %-10s %s\n", r.step,
                  fmt_double(r.time).c_str(), r.system.c_str(), r.mode.c_str(),
                  r.next_mode.c_str(), r.outcome.c_str(), r.decision.c_str(), flags.c_str());
    out << line;
  }
  return out.str();
}

std::string describe(const QueryTask& task) {
  std::string kind = std::holds_alternative<Measure>(task.action)   ? "measure"
                     : std::holds_alternative<Actuate>(task.action) ? "actuate"
                                                                     : "question";
  return std::string(to_string(task.priority)) + ":" + kind + ":" + task.target();
}

void record_step(TraceRecord& record, const ModeId& mode_before, const StepResult& result) {
  record.mode = mode_before.name();
  record.next_mode = result.state.current.name();
  record.scores.clear();
  for (const auto& [m, s] : result.scores.values()) record.scores.emplace(m.name(), s);
  record.outcome = std::string(to_string(kind_of(result.outcome)));
  record.point.clear();
  record.support.clear();
  if (const auto* p = std::get_if<PointOutcome>(&result.outcome)) {
    for (const auto& [m, t] : p->point.coords()) record.point.emplace(m.name(), t);
  } else if (const auto* c = std::get_if<ContradictionOutcome>(&result.outcome)) {
    for (const auto& m : c->support) record.support.push_back(m.name());
  }
  record.decision = std::string(to_string(kind_of(result.decision)));
  record.target.clear();
  record.undefined.clear();
  if (auto to = target_of(result.decision)) record.target = to->name();
  if (const auto* t = std::get_if<TransitionDecision>(&result.decision)) {
    record.undefined.assign(t->result.undefined_outputs.begin(), t->result.undefined_outputs.end());
  } else if (const auto* d = std::get_if<DegradedTransition>(&result.decision)) {
    record.undefined.assign(d->result.undefined_outputs.begin(), d->result.undefined_outputs.end());
  }
  for (const auto& q : result.queries) record.queries.push_back(describe(q));
}

void record_state(TraceRecord& record, const ModeState& state) {
  record.state.clear();
  for (const auto& v : state.variables()) {
    auto r = state.get(v);
    record.state.emplace(v, r ? std::optional<double>(r->value) : std::nullopt);
  }
}

TraceSummary summarize(const Trace& trace) {
  TraceSummary s;
  const double p_low = trace.header.p_low;
  const double p_high = trace.header.p_high;
  std::map<std::size_t, std::size_t> inside_per_step;
  for (const auto& r : trace.records) {
    ++s.occupancy[r.system][r.mode];
    if (r.outcome == "partiality") ++s.partiality;
    if (r.outcome == "contradiction") ++s.contradiction;
    if (r.decision == "transition") ++s.transitions;
    if (r.decision == "degraded") ++s.degraded;
    if (r.decision == "alarm") ++s.alarms;
    if (r.decision == "merged") ++s.merged_steps;

    auto cur = r.scores.find(r.mode);
    const bool well = cur != r.scores.end() && cur->second > p_high;
    if (well && r.decision != "stay" && r.decision != "merged") ++s.hysteresis_violations;
    if (r.decision == "transition") {
      auto to = r.scores.find(r.target);
      if (to == r.scores.end() || !(to->second > p_low)) ++s.guard_violations;
    }
    if (auto in = r.truth.find("inside"); in != r.truth.end() && in->second > 0.5) {
      ++inside_per_step[r.step];
    }
  }
  s.verdicts["hysteresis"] = s.hysteresis_violations == 0;
  s.verdicts["guarded_transitions"] = s.guard_violations == 0;
  if (trace.header.scenario == "chicane") {
    bool exclusive = true;
    for (const auto& [step, n] : inside_per_step) exclusive = exclusive && n <= 1;
    s.verdicts["chicane_exclusive"] = exclusive;
  } else if (trace.header.scenario == "solar") {
    s.verdicts["no_contradiction"] = s.contradiction == 0;
  } else if (trace.header.scenario == "manifold") {
    s.verdicts["no_partiality"] = s.partiality == 0;
  }
  return s;
}

std::string format_summary(const TraceSummary& s) {
  std::ostringstream out;
  out << "occupancy:\n";
  for (const auto& [system, modes] : s.occupancy) {
    out << "  " << system << ":";
    for (const auto& [mode, n] : modes) out << " " << mode << "=" << n;
    out << "\n";
  }
  out << "transitions: " << s.transitions << "\n";
  out << "degraded transitions: " << s.degraded << "\n";
  out << "merged steps: " << s.merged_steps << "\n";
  out << "exceptions: partiality=" << s.partiality << " contradiction=" << s.contradiction << "\n";
  out << "alarms: " << s.alarms << "\n";
  out << "safety:\n";
  for (const auto& [name, ok] : s.verdicts) out << "  " << name << ": " << (ok ? "ok" : "VIOLATED") << "\n";
  return out.str();
}

}  // namespace modal
