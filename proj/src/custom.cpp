#include <algorithm>

#include "modal/error.hpp"
#include "modal/scenarios.hpp"
#include "sim_support.hpp"

namespace modal {

namespace {

const std::string kStepVariable = "step";

ScoreVector scheduled_scores(const CustomConfig& config, double step) {
  std::map<ModeId, double> scores;
  for (const auto& m : config.nerve.vertices()) scores.emplace(m, 0.0);
  const ScheduleEntry* active = nullptr;
  for (const auto& e : config.schedule) {
    if (static_cast<double>(e.from_step) <= step && (!active || e.from_step >= active->from_step)) {
      active = &e;
    }
  }
  if (active) {
    for (const auto& [m, s] : active->scores) scores[m] = s;
  }
  return ScoreVector(std::move(scores));
}

}  // namespace

TransitionRegistry CustomConfig::registry() const {
  TransitionRegistry out;
  for (const auto& t : transitions) out.add(t.from, t.to, copy_transition(), t.degraded_only);
  return out;
}

void CustomConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (nerve.vertices().empty()) fail("custom scenario needs a nerve");
  if (initial_mode && !nerve.has_vertex(*initial_mode)) {
    fail("initial mode " + initial_mode->name() + " is not a nerve vertex");
  }
  for (const auto& t : transitions) {
    if (!nerve.has_vertex(t.from) || !nerve.has_vertex(t.to)) {
      fail("transition " + t.from.name() + " -> " + t.to.name() + " names an unknown mode");
    }
    if (t.from == t.to) fail("transition from " + t.from.name() + " to itself");
  }
  for (const auto& e : schedule) {
    for (const auto& [m, s] : e.scores) {
      if (!nerve.has_vertex(m)) fail("schedule scores unknown mode " + m.name());
      if (!(s >= 0.0 && s <= 1.0)) fail("schedule score for " + m.name() + " outside [0, 1]");
    }
  }
  supervisor.validate(nerve);
}

Trace run_custom(const CustomConfig& config, std::uint64_t seed, std::size_t steps) {
  config.validate();
  ModeRegistry registry(config.nerve);
  const Evaluator evaluator = [&config](const ModeId&, const ModeState& x, const Orders&) {
    auto r = x.get(kStepVariable);
    return scheduled_scores(config, r ? r->value : 0.0);
  };
  for (const auto& m : config.nerve.vertices()) registry.register_mode(m, evaluator);
  const TransitionRegistry transitions = config.registry();

  SupervisorState sup;
  sup.current = config.initial_mode.value_or(*config.nerve.vertices().begin());
  ModeState picture;
  picture.mark_undefined(kStepVariable);
  Orders orders;

  OracleConfig oc;
  oc.deadline = 0.0;
  oc.seed = seed + 1;
  oc.faults = detail::faults_for(config.faults, "system");
  oc.standing_tasks = {
      QueryTask{Repeat{1.0}, Priority::Standard, Measure{kStepVariable, 1.0}, std::nullopt}};
  OracleInterface oracle(std::move(oc), [](const std::string& name, double t) -> std::optional<double> {
    if (name == kStepVariable) return t;
    return std::nullopt;
  });

  Trace trace;
  trace.header = {"custom", seed, steps, config.supervisor.thresholds.p_low(),
                  config.supervisor.thresholds.p_high()};
  for (std::size_t k = 0; k < steps; ++k) {
    const double now = static_cast<double>(k);
    TraceRecord record;
    record.step = k;
    record.time = now;
    record.system = "system";
    detail::apply_responses(picture, oracle.poll(now), record.flags);
    const ModeId before = sup.current;
    StepResult r = step(config.supervisor, sup, picture, orders, ModeSystem{registry, transitions}, now);
    record_step(record, before, r);
    if (const ModeState* s = detail::produced_state(r.decision)) picture = *s;
    if (const Orders* o = detail::produced_orders(r.decision)) orders = *o;
    sup = std::move(r.state);
    for (const auto& q : r.queries) oracle.enqueue(q, now);
    detail::apply_responses(picture, oracle.poll(now), record.flags);
    record_state(record, picture);
    trace.records.push_back(std::move(record));
  }
  return trace;
}

}  // namespace modal
