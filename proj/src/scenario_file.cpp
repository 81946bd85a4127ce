#include "modal/scenario_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "modal/error.hpp"

namespace modal {

namespace {

using json = nlohmann::json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

[[noreturn]] void type_error(const std::string& where, const char* expected) {
  throw Error(ErrorCode::ParseError, where + ": expected " + expected);
}

const json& expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) type_error(where, "an object");
  return j;
}

const json& expect_array(const json& j, const std::string& where) {
  if (!j.is_array()) type_error(where, "an array");
  return j;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) type_error(where, "a number");
  return j.get<double>();
}

std::uint64_t as_unsigned(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) type_error(where, "a non-negative integer");
  return j.get<std::uint64_t>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) type_error(where, "a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) type_error(where, "a string");
  return j.get<std::string>();
}

std::vector<std::string> as_strings(const json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

OrderValue as_order_value(const json& j, const std::string& where) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  type_error(where, "a boolean, number or string");
}

Orders as_orders(const json& j, const std::string& where) {
  expect_object(j, where);
  Orders out;
  for (const auto& [name, value] : j.items()) out.set(name, as_order_value(value, where + "." + name));
  return out;
}

/// Collects itemized problems while walking a scenario document.
class Loader {
 public:
  explicit Loader(ValidationReport& report) : report_(report) {}

  void error(const std::string& message) { report_.errors.push_back(message); }
  void warning(const std::string& message) { report_.warnings.push_back(message); }

  void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) error(where + ": unknown key '" + key + "'");
    }
  }

  /// Runs `f`, recording a library error as a report item instead of throwing.
  template <typename F>
  bool guard(const std::string& where, F&& f) {
    try {
      f();
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      error(where + ": " + e.what());
      return false;
    }
  }

 private:
  ValidationReport& report_;
};

std::optional<Nerve> read_nerve(const json& j, Loader& L, const std::string& where) {
  expect_object(j, where);
  L.check_keys(j, {"vertices", "simplices"}, where);
  std::vector<std::string> vertex_names;
  if (j.contains("vertices")) vertex_names = as_strings(j["vertices"], where + ".vertices");
  std::vector<std::vector<std::string>> declared;
  if (j.contains("simplices")) {
    const json& s = expect_array(j["simplices"], where + ".simplices");
    for (std::size_t i = 0; i < s.size(); ++i) {
      declared.push_back(as_strings(s[i], where + ".simplices[" + std::to_string(i) + "]"));
    }
  }
  std::optional<Nerve> out;
  L.guard(where, [&] {
    std::vector<ModeId> vertices;
    std::set<std::string> seen;
    for (const auto& v : vertex_names) {
      if (!seen.insert(v).second) throw Error(ErrorCode::DuplicateVertexName, "vertex '" + v + "' declared twice");
      vertices.emplace_back(v);
    }
    std::vector<std::vector<ModeId>> sets;
    for (const auto& d : declared) {
      std::vector<ModeId> set;
      for (const auto& v : d) {
        if (!vertex_names.empty() && !seen.count(v)) {
          throw Error(ErrorCode::UnknownMode, "simplex names undeclared vertex '" + v + "'");
        }
        set.emplace_back(v);
      }
      sets.push_back(std::move(set));
    }
    if (vertices.empty() && sets.empty()) throw Error(ErrorCode::ConfigInvalid, "nerve has no vertices");
    out = Nerve::build(vertices, sets);
  });
  return out;
}

std::vector<FaultSpec> read_faults(const json& j, Loader& L) {
  std::vector<FaultSpec> out;
  expect_array(j, "faults");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "faults[" + std::to_string(i) + "]";
    const json& f = expect_object(j[i], where);
    L.check_keys(f, {"start", "end", "target", "flag", "system"}, where);
    FaultSpec spec;
    if (!f.contains("start") || !f.contains("end")) {
      L.error(where + ": start and end are required");
      continue;
    }
    spec.window.start = as_number(f["start"], where + ".start");
    spec.window.end = as_number(f["end"], where + ".end");
    if (!(spec.window.start < spec.window.end)) L.error(where + ": start must be before end");
    if (f.contains("target")) spec.window.target = as_string(f["target"], where + ".target");
    if (f.contains("system")) spec.system = as_string(f["system"], where + ".system");
    if (f.contains("flag")) {
      const std::string name = as_string(f["flag"], where + ".flag");
      try {
        spec.window.flag = quality_flag_from_string(name);
      } catch (const Error&) {
        L.error(where + ": unknown quality flag '" + name + "'");
      }
    }
    out.push_back(spec);
  }
  return out;
}

SupervisorConfig read_supervisor(const json& j, Loader& L, const Nerve& nerve, Thresholds thresholds) {
  SupervisorConfig out;
  out.thresholds = thresholds;
  expect_object(j, "supervisor");
  L.check_keys(j,
               {"history_window", "strategy", "safe_mode", "bias_weight", "safety_orders",
                "consensus_orders"},
               "supervisor");
  if (j.contains("history_window")) {
    out.history_window = as_unsigned(j["history_window"], "supervisor.history_window");
  }
  if (j.contains("bias_weight")) out.bias_weight = as_number(j["bias_weight"], "supervisor.bias_weight");
  auto mode_of = [&](const std::string& name, const std::string& where) -> std::optional<ModeId> {
    if (name.empty() || !nerve.has_vertex(ModeId(name))) {
      L.error(where + ": '" + name + "' is not a nerve vertex");
      return std::nullopt;
    }
    return ModeId(name);
  };
  const std::string strategy =
      j.contains("strategy") ? as_string(j["strategy"], "supervisor.strategy") : "dove";
  if (strategy == "hawk") {
    out.strategy = Hawk{};
  } else if (strategy == "dove") {
    out.strategy = Dove{};
  } else if (strategy == "consensus") {
    out.strategy = Consensus{};
  } else if (strategy == "failsafe") {
    if (!j.contains("safe_mode")) {
      L.error("supervisor: the failsafe strategy needs safe_mode");
    } else if (auto m = mode_of(as_string(j["safe_mode"], "supervisor.safe_mode"), "supervisor.safe_mode")) {
      out.strategy = FailSafe{*m};
    }
  } else {
    L.error("supervisor.strategy: unknown strategy '" + strategy + "'");
  }
  if (j.contains("safe_mode") && strategy != "failsafe") {
    L.error("supervisor.safe_mode: only used by the failsafe strategy");
  }
  if (j.contains("safety_orders")) {
    const json& s = expect_object(j["safety_orders"], "supervisor.safety_orders");
    for (const auto& [name, orders] : s.items()) {
      const std::string where = "supervisor.safety_orders." + name;
      Orders o = as_orders(orders, where);
      if (auto m = mode_of(name, where)) out.safety_orders[*m] = std::move(o);
    }
  }
  if (j.contains("consensus_orders")) {
    const json& c = expect_array(j["consensus_orders"], "supervisor.consensus_orders");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string where = "supervisor.consensus_orders[" + std::to_string(i) + "]";
      const json& e = expect_object(c[i], where);
      L.check_keys(e, {"support", "orders"}, where);
      if (!e.contains("support") || !e.contains("orders")) {
        L.error(where + ": support and orders are required");
        continue;
      }
      ModeSet support;
      for (const auto& name : as_strings(e["support"], where + ".support")) {
        if (auto m = mode_of(name, where + ".support")) support.insert(*m);
      }
      out.consensus_orders[support] = as_orders(e["orders"], where + ".orders");
    }
  }
  L.guard("supervisor", [&] { out.validate(nerve); });
  return out;
}

void read_refinement(const json& j, Loader& L, const std::optional<Nerve>& nerve) {
  expect_object(j, "refinement");
  L.check_keys(j, {"containment", "active"}, "refinement");
  std::map<ModeId, ModeId> containment;
  ModeSet active;
  bool ok = L.guard("refinement", [&] {
    if (j.contains("containment")) {
      const json& c = expect_object(j["containment"], "refinement.containment");
      for (const auto& [fine, coarse] : c.items()) {
        containment.emplace(ModeId(fine), ModeId(as_string(coarse, "refinement.containment." + fine)));
      }
    }
    if (j.contains("active")) {
      for (const auto& m : as_strings(j["active"], "refinement.active")) active.insert(ModeId(m));
    }
  });
  if (!ok || !nerve) return;
  const RefinementReport report = validate_refinement(*nerve, containment, active);
  for (const auto& v : report.violations) {
    if (v.kind == RefinementViolation::Kind::UnknownParent) {
      L.error("refinement: fine mode " + v.fine.name() + " is contained in " + v.parent->name() +
              ", which is not a coarse nerve vertex");
    } else {
      L.error("refinement: active fine mode " + v.fine.name() + " has no coarse parent");
    }
  }
}

/// Reads the "params" block of a built-in scenario, reporting unknown keys.
class Params {
 public:
  Params(const json& j, Loader& L, std::string kind) : j_(j), L_(L), kind_(std::move(kind)) {
    expect_object(j_, "params");
  }
  ~Params() {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) L_.error("params: unknown key '" + key + "' for scenario " + kind_);
    }
  }

  void number(const char* key, double& target) {
    if (take(key)) target = as_number(j_[key], std::string("params.") + key);
  }
  void optional_number(const char* key, std::optional<double>& target) {
    if (take(key)) target = as_number(j_[key], std::string("params.") + key);
  }
  void flag(const char* key, bool& target) {
    if (take(key)) target = as_bool(j_[key], std::string("params.") + key);
  }
  void count(const char* key, std::size_t& target) {
    if (take(key)) target = as_unsigned(j_[key], std::string("params.") + key);
  }
  std::optional<std::string> text(const char* key) {
    if (!take(key)) return std::nullopt;
    return as_string(j_[key], std::string("params.") + key);
  }
  const json* raw(const char* key) { return take(key) ? &j_[key] : nullptr; }

 private:
  bool take(const char* key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const json& j_;
  Loader& L_;
  std::string kind_;
  std::set<std::string> used_;
};

ChicaneConfig read_chicane(const json& j, Loader& L) {
  ChicaneConfig c;
  Params p(j, L, "chicane");
  p.number("track_length", c.track_length);
  p.number("chicane_center", c.chicane_center);
  p.number("chicane_half_width", c.chicane_half_width);
  p.number("stopping_distance", c.stopping_distance);
  p.number("ramp_distance", c.ramp_distance);
  p.number("max_speed", c.max_speed);
  p.number("braking_rate", c.braking_rate);
  p.number("dt", c.dt);
  p.number("stop_margin", c.stop_margin);
  p.number("min_cruise_fraction", c.min_cruise_fraction);
  if (auto policy = p.text("policy")) {
    if (*policy == "autonomous") {
      c.policy = ChicanePolicy::Autonomous;
    } else if (*policy == "communal") {
      c.policy = ChicanePolicy::Communal;
    } else if (*policy == "priority") {
      c.policy = ChicanePolicy::Priority;
    } else {
      L.error("params.policy: unknown policy '" + *policy + "'");
    }
  }
  return c;
}

SolarConfig read_solar(const json& j, Loader& L) {
  SolarConfig c;
  Params p(j, L, "solar");
  if (const json* orbits = p.raw("orbits")) {
    expect_array(*orbits, "params.orbits");
    if (orbits->size() != 3) {
      L.error("params.orbits: exactly three orbits are required");
    } else {
      for (std::size_t i = 0; i < 3; ++i) {
        const std::string where = "params.orbits[" + std::to_string(i) + "]";
        const json& o = expect_object((*orbits)[i], where);
        L.check_keys(o, {"radius", "speed", "phase"}, where);
        if (o.contains("radius")) c.orbits[i].radius = as_number(o["radius"], where + ".radius");
        if (o.contains("speed")) c.orbits[i].speed = as_number(o["speed"], where + ".speed");
        if (o.contains("phase")) c.orbits[i].phase = as_number(o["phase"], where + ".phase");
      }
    }
  }
  p.number("near", c.near);
  p.number("far", c.far);
  p.number("dt", c.dt);
  p.flag("cooperation", c.cooperation);
  p.number("start_failure_probability", c.start_failure_probability);
  p.number("coarse_accuracy", c.coarse_accuracy);
  return c;
}

ManifoldConfig read_manifold(const json& j, Loader& L) {
  ManifoldConfig c;
  Params p(j, L, "manifold");
  p.count("charts", c.charts);
  p.number("angular_speed", c.angular_speed);
  p.number("dt", c.dt);
  p.optional_number("initial_angle", c.initial_angle);
  return c;
}

CustomConfig read_custom(const json& j, Loader& L, const Nerve& nerve) {
  CustomConfig c;
  c.nerve = nerve;
  Params p(j, L, "custom");
  if (auto initial = p.text("initial_mode")) {
    L.guard("params.initial_mode", [&] { c.initial_mode = ModeId(*initial); });
  }
  if (const json* schedule = p.raw("schedule")) {
    expect_array(*schedule, "params.schedule");
    for (std::size_t i = 0; i < schedule->size(); ++i) {
      const std::string where = "params.schedule[" + std::to_string(i) + "]";
      const json& e = expect_object((*schedule)[i], where);
      L.check_keys(e, {"from_step", "scores"}, where);
      ScheduleEntry entry;
      if (e.contains("from_step")) entry.from_step = as_unsigned(e["from_step"], where + ".from_step");
      if (e.contains("scores")) {
        const json& s = expect_object(e["scores"], where + ".scores");
        L.guard(where, [&] {
          for (const auto& [mode, score] : s.items()) {
            entry.scores.emplace(ModeId(mode), as_number(score, where + ".scores." + mode));
          }
        });
      }
      c.schedule.push_back(std::move(entry));
    }
  }
  return c;
}

std::optional<Thresholds> read_thresholds(const json& j, Loader& L) {
  expect_object(j, "thresholds");
  L.check_keys(j, {"p_low", "p_high"}, "thresholds");
  if (!j.contains("p_low") || !j.contains("p_high")) {
    L.error("thresholds: p_low and p_high are required");
    return std::nullopt;
  }
  const double lo = as_number(j["p_low"], "thresholds.p_low");
  const double hi = as_number(j["p_high"], "thresholds.p_high");
  std::optional<Thresholds> out;
  L.guard("thresholds", [&] { out = Thresholds(lo, hi); });
  return out;
}

Thresholds default_thresholds(const std::string& kind, std::size_t charts) {
  if (kind == "chicane") return Thresholds(0.2, 0.9);
  if (kind == "solar") return Thresholds(0.1, 0.6);
  if (kind == "manifold") {
    ManifoldConfig m;
    m.charts = charts;
    return m.effective_thresholds();
  }
  return Thresholds(0.2, 0.9);
}

void report_table(Loader& L, const TransitionRegistry& table, const Nerve& nerve) {
  for (const auto& w : table.validate(nerve)) L.warning(w.message);
}

struct Loaded {
  std::optional<Scenario> scenario;
};

Loaded load(std::string_view text, ValidationReport& report) {
  Loader L(report);
  const json doc = parse_json(text);
  expect_object(doc, "scenario file");
  Loaded out;
  if (!doc.contains("scenario") && (doc.contains("vertices") || doc.contains("simplices"))) {
    // A bare nerve declaration: check it alone.
    read_nerve(doc, L, "nerve");
    return out;
  }
  L.check_keys(doc,
               {"scenario", "description", "seed", "steps", "thresholds", "nerve", "transitions",
                "refinement", "supervisor", "faults", "params"},
               "scenario file");

  if (!doc.contains("scenario")) {
    L.error("scenario file: 'scenario' is required");
    return out;
  }
  const std::string kind = as_string(doc["scenario"], "scenario");
  if (kind != "chicane" && kind != "solar" && kind != "manifold" && kind != "custom") {
    L.error("scenario: unknown kind '" + kind + "'");
    return out;
  }
  if (doc.contains("description")) as_string(doc["description"], "description");

  Scenario s;
  s.kind = kind;
  if (doc.contains("seed")) s.seed = as_unsigned(doc["seed"], "seed");
  std::optional<std::size_t> steps;
  if (doc.contains("steps")) steps = as_unsigned(doc["steps"], "steps");

  std::optional<Thresholds> thresholds;
  if (doc.contains("thresholds")) thresholds = read_thresholds(doc["thresholds"], L);

  std::optional<Nerve> declared;
  if (doc.contains("nerve")) declared = read_nerve(doc["nerve"], L, "nerve");

  std::vector<TransitionSpec> transitions;
  if (doc.contains("transitions")) {
    const json& t = expect_array(doc["transitions"], "transitions");
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string where = "transitions[" + std::to_string(i) + "]";
      const json& e = expect_object(t[i], where);
      L.check_keys(e, {"from", "to", "degraded_only"}, where);
      if (!e.contains("from") || !e.contains("to")) {
        L.error(where + ": from and to are required");
        continue;
      }
      const std::string from = as_string(e["from"], where + ".from");
      const std::string to = as_string(e["to"], where + ".to");
      const bool degraded = e.contains("degraded_only") && as_bool(e["degraded_only"], where + ".degraded_only");
      L.guard(where, [&] { transitions.push_back({ModeId(from), ModeId(to), degraded}); });
    }
  }

  std::vector<FaultSpec> faults;
  if (doc.contains("faults")) faults = read_faults(doc["faults"], L);
  const json supervisor = doc.contains("supervisor") ? doc["supervisor"] : json::object();
  const json params = doc.contains("params") ? doc["params"] : json::object();

  // The mode system each kind runs on; built-in kinds ignore nothing silently.
  std::optional<Nerve> nerve;
  std::vector<Nerve> builtin;
  TransitionRegistry table;
  std::size_t charts = 0;

  if (kind == "chicane") {
    ChicaneConfig c = read_chicane(params, L);
    builtin = {chicane_nerve()};
    table.add("alpha", "beta", copy_transition());
    table.add("beta", "alpha", copy_transition());
    s.steps = steps.value_or(kChicaneDefaultSteps);
    c.faults = faults;
    s.config = c;
  } else if (kind == "solar") {
    SolarConfig c = read_solar(params, L);
    builtin = {solar_nerve(1), solar_nerve(2), solar_nerve(3)};
    const auto modes = solar_modes(1);
    for (const auto& a : modes) {
      for (const auto& b : modes) {
        if (a != b) table.add(a, b, copy_transition());
      }
    }
    s.steps = steps.value_or(kSolarDefaultSteps);
    c.faults = faults;
    s.config = c;
  } else if (kind == "manifold") {
    ManifoldConfig c = read_manifold(params, L);
    charts = c.charts;
    if (L.guard("params.charts", [&] { builtin = {build_atlas(c.charts).nerve}; })) {
      table = atlas_transitions(build_atlas(c.charts));
    }
    c.thresholds = thresholds;
    s.steps = steps.value_or(kManifoldDefaultSteps);
    c.faults = faults;
    s.config = c;
  } else {
    s.steps = steps.value_or(kCustomDefaultSteps);
  }

  if (kind == "custom") {
    if (!declared) {
      if (!doc.contains("nerve")) L.error("nerve: the custom scenario needs a nerve declaration");
      return out;
    }
    nerve = declared;
    for (const auto& t : transitions) {
      if (!nerve->has_vertex(t.from) || !nerve->has_vertex(t.to)) {
        L.error("transitions: " + t.from.name() + " -> " + t.to.name() + " names a mode outside the nerve");
      } else {
        table.add(t.from, t.to, copy_transition(), t.degraded_only);
      }
    }
  } else {
    if (!transitions.empty()) L.error("transitions: the " + kind + " scenario has a built-in transition table");
    if (!builtin.empty()) {
      nerve = builtin.front();
      if (declared) {
        bool matches = false;
        for (const auto& b : builtin) matches = matches || b == *declared;
        if (!matches) L.error("nerve: declaration does not match the " + kind + " mode portfolio");
      }
    }
  }

  if (doc.contains("refinement")) read_refinement(doc["refinement"], L, nerve ? nerve : declared);
  if (!nerve) return out;

  report_table(L, table, *nerve);

  const Thresholds th = thresholds.value_or(default_thresholds(kind, charts));
  SupervisorConfig sc = read_supervisor(supervisor, L, *nerve, th);

  if (kind != "custom") {
    std::visit(
      [&](auto& c) {
        using C = std::decay_t<decltype(c)>;
        c.supervisor = sc;
        if constexpr (std::is_same_v<C, ManifoldConfig>) c.supervisor.thresholds = c.effective_thresholds();
        L.guard("params", [&] { c.validate(); });
      },
      s.config);
  } else {
    CustomConfig c = read_custom(params, L, *nerve);
    c.transitions = transitions;
    c.supervisor = sc;
    c.faults = faults;
    L.guard("params", [&] { c.validate(); });
    s.config = std::move(c);
  }

  if (report.ok()) out.scenario = std::move(s);
  return out;
}

}  // namespace

ValidationReport validate_scenario(std::string_view text) {
  ValidationReport report;
  load(text, report);
  return report;
}

Scenario load_scenario(std::string_view text) {
  ValidationReport report;
  Loaded loaded = load(text, report);
  if (!loaded.scenario) {
    std::string message = "invalid scenario";
    for (const auto& e : report.errors) message += "\n  " + e;
    throw Error(ErrorCode::ConfigInvalid, message);
  }
  return std::move(*loaded.scenario);
}

Trace run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed,
                   std::optional<std::size_t> steps) {
  const std::uint64_t s = seed.value_or(scenario.seed);
  const std::size_t k = steps.value_or(scenario.steps);
  return std::visit(
      [&](const auto& c) -> Trace {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ChicaneConfig>) return run_chicane(c, s, k);
        else if constexpr (std::is_same_v<C, SolarConfig>) return run_solar(c, s, k);
        else if constexpr (std::is_same_v<C, ManifoldConfig>) return run_manifold(c, s, k);
        else return run_custom(c, s, k);
      },
      scenario.config);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Nerve parse_nerve(std::string_view text) {
  ValidationReport report;
  Loader L(report);
  const json doc = parse_json(text);
  // A scenario file carrying a nerve declaration is accepted too.
  const bool nested = doc.is_object() && doc.contains("nerve");
  std::optional<Nerve> nerve = read_nerve(nested ? doc["nerve"] : doc, L, "nerve");
  if (!report.ok() || !nerve) {
    std::string message = report.errors.empty() ? "invalid nerve" : report.errors.front();
    for (std::size_t i = 1; i < report.errors.size(); ++i) message += "; " + report.errors[i];
    throw Error(ErrorCode::ConfigInvalid, message);
  }
  return *nerve;
}

ScoreVector parse_scores(std::string_view text) {
  const json j = parse_json(text);
  expect_object(j, "scores");
  std::map<ModeId, double> scores;
  for (const auto& [mode, value] : j.items()) scores.emplace(ModeId(mode), as_number(value, "scores." + mode));
  return ScoreVector(std::move(scores));
}

}  // namespace modal
