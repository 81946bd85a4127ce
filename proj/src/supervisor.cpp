#include "modal/supervisor.hpp"

#include <algorithm>
#include <cmath>

#include "modal/error.hpp"

namespace modal {

namespace {

constexpr double kSlopeTolerance = 1e-12;
constexpr double kRequeryAccuracy = 1.0;
const char* const kHoldingAction = "remain in current mode, re-query sensors";

std::vector<QueryTask> requery_all(const ModeState& x) {
  std::vector<QueryTask> out;
  for (const auto& v : x.variables()) out.push_back(QueryTask::measure(v, kRequeryAccuracy, Priority::Urgent));
  return out;
}

Alarm make_alarm(const SupervisorConfig& config, const ModeId& current, ExceptionRecord record) {
  return Alarm{std::move(record), kHoldingAction, config.safety_for(current)};
}

ModeId argmax_over(const ModeSet& support, const ScoreVector& scores) {
  std::optional<std::pair<ModeId, double>> best;
  for (const auto& m : support) {
    const double s = scores.at(m);
    if (!best || s > best->second) best = std::make_pair(m, s);
  }
  return best->first;
}

}  // namespace

std::string_view strategy_name(const ContradictionStrategy& strategy) noexcept {
  switch (strategy.index()) {
    case 0: return "hawk";
    case 1: return "dove";
    case 2: return "failsafe";
    default: return "consensus";
  }
}

Orders SupervisorConfig::safety_for(const ModeId& mode) const {
  auto it = safety_orders.find(mode);
  if (it != safety_orders.end()) return it->second;
  return Orders{{"degraded", true}};
}

void SupervisorConfig::validate(const Nerve& nerve) const {
  if (history_window == 0) throw Error(ErrorCode::ConfigInvalid, "history window must be >= 1");
  if (!(bias_weight >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "bias weight must be >= 0");
  if (const auto* fs = std::get_if<FailSafe>(&strategy); fs && !nerve.has_vertex(fs->safe_mode)) {
    throw Error(ErrorCode::ConfigInvalid,
                "fail-safe mode " + fs->safe_mode.name() + " is not a nerve vertex");
  }
}

std::string_view to_string(ExceptionRecord::Kind kind) noexcept {
  switch (kind) {
    case ExceptionRecord::Kind::Partiality: return "partiality";
    case ExceptionRecord::Kind::Contradiction: return "contradiction";
    case ExceptionRecord::Kind::MissingTransition: return "missing_transition";
  }
  return "unknown";
}

DecisionKind kind_of(const Decision& decision) noexcept {
  return static_cast<DecisionKind>(decision.index());
}

std::string_view to_string(DecisionKind kind) noexcept {
  switch (kind) {
    case DecisionKind::Stay: return "stay";
    case DecisionKind::Transition: return "transition";
    case DecisionKind::Degraded: return "degraded";
    case DecisionKind::Alarm: return "alarm";
  }
  return "unknown";
}

std::optional<ModeId> target_of(const Decision& decision) {
  if (const auto* t = std::get_if<TransitionDecision>(&decision)) return t->to;
  if (const auto* d = std::get_if<DegradedTransition>(&decision)) return d->to;
  return std::nullopt;
}

ModeId tie_break(const ModeSet& candidates, const std::deque<NervePoint>& history,
                 const ModeId& current) {
  if (candidates.empty()) throw Error(ErrorCode::ConfigInvalid, "tie_break needs a candidate");
  if (candidates.size() == 1) return *candidates.begin();

  auto fallback = [&current](const ModeSet& set) {
    return set.count(current) ? current : *set.begin();
  };

  const std::size_t n = history.size();
  if (n < 2) return fallback(candidates);

  const double x_mean = 0.5 * static_cast<double>(n - 1);
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxx += (i - x_mean) * (i - x_mean);

  std::map<ModeId, double> slopes;
  double best = -INFINITY;
  for (const auto& c : candidates) {
    double t_mean = 0.0;
    for (const auto& p : history) t_mean += p.coordinate(c);
    t_mean /= static_cast<double>(n);
    double sxt = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxt += (i - x_mean) * (history[i].coordinate(c) - t_mean);
    const double slope = sxt / sxx;
    slopes.emplace(c, slope);
    best = std::max(best, slope);
  }
  if (!(best > kSlopeTolerance)) return fallback(candidates);

  ModeSet leaders;
  for (const auto& [c, s] : slopes) {
    if (s >= best - kSlopeTolerance) leaders.insert(c);
  }
  return leaders.size() == 1 ? *leaders.begin() : fallback(leaders);
}

Decision handle_partiality(const SupervisorConfig& config, const ScoreVector& scores,
                           const ModeId& current, const ModeSystem& system, const ModeState& x,
                           const Orders& o) {
  const Nerve& nerve = system.nerve();
  struct Ranked {
    ModeId mode;
    double rank;
  };
  std::vector<Ranked> ranked;
  const double unreachable = static_cast<double>(nerve.vertices().size());
  for (const auto& m : nerve.vertices()) {
    const double s = scores.at(m);
    // A zero score declares the mode incompatible with the state.
    if (!(s > 0.0)) continue;
    auto d = nerve.edge_distance(current, m);
    const double dist = d ? static_cast<double>(*d) : unreachable;
    ranked.push_back({m, s - config.bias_weight * dist});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.rank > b.rank; });

  if (ranked.empty()) {
    return make_alarm(config, current,
                      {ExceptionRecord::Kind::Partiality, {}, "every mode scores zero"});
  }
  if (ranked.front().mode == current) return Stay{config.safety_for(current)};

  for (const auto& r : ranked) {
    if (r.mode == current || !system.transitions.has(current, r.mode)) continue;
    Orders safety = config.safety_for(r.mode);
    TransitionResult result = system.transitions.apply(current, r.mode, x, o, scores,
                                                       config.thresholds, true);
    result.orders = result.orders.merged_with(safety);
    return DegradedTransition{r.mode, std::move(safety), std::move(result)};
  }
  return make_alarm(config, current,
                    {ExceptionRecord::Kind::Partiality, {},
                     "no transition from " + current.name() + " to any ranked mode"});
}

Decision handle_contradiction(const SupervisorConfig& config, const ModeSet& support,
                              const ScoreVector& scores, const ModeId& current,
                              const ModeSystem& system, const ModeState& x, const Orders& o) {
  ModeId chosen = argmax_over(support, scores);
  std::optional<Orders> imposed;

  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Dove>) {
          imposed = config.safety_for(chosen);
        } else if constexpr (std::is_same_v<S, FailSafe>) {
          if (support.count(s.safe_mode)) {
            chosen = s.safe_mode;
          } else {
            imposed = config.safety_for(chosen);
          }
        } else if constexpr (std::is_same_v<S, Consensus>) {
          auto it = config.consensus_orders.find(support);
          if (it != config.consensus_orders.end()) {
            imposed = it->second;
          } else {
            Orders merged;
            for (const auto& m : support) merged = merged.merged_with(config.safety_for(m));
            imposed = merged;
          }
        }
      },
      config.strategy);

  if (chosen == current) return Stay{imposed};
  if (!system.transitions.has(current, chosen)) {
    return make_alarm(config, current,
                      {ExceptionRecord::Kind::MissingTransition, support,
                       "no transition from " + current.name() + " to " + chosen.name()});
  }
  TransitionResult result =
      system.transitions.apply(current, chosen, x, o, scores, config.thresholds);
  if (imposed) result.orders = result.orders.merged_with(*imposed);
  return TransitionDecision{chosen, std::move(result), imposed};
}

StepResult step(const SupervisorConfig& config, const SupervisorState& state,
                const ModeState& x, const Orders& o, const ModeSystem& system, double now) {
  const Nerve& nerve = system.nerve();
  SupervisorState next = state;
  ScoreVector scores = system.modes.evaluate(state.current, x, o);
  ClassificationOutcome outcome = classify(scores, config.thresholds, nerve);

  if (const auto* p = std::get_if<PointOutcome>(&outcome)) {
    next.recent_points.push_back(p->point);
    while (next.recent_points.size() > config.history_window) next.recent_points.pop_front();
  }

  std::vector<QueryTask> queries;
  Decision decision = Stay{};

  if (scores.at(state.current) > config.thresholds.p_high()) {
    decision = Stay{};
  } else if (std::holds_alternative<PointOutcome>(outcome)) {
    ModeSet candidates;
    for (const auto& m : scores.maximisers()) {
      if (nerve.has_vertex(m)) candidates.insert(m);
    }
    const ModeId chosen = tie_break(candidates, next.recent_points, state.current);
    if (chosen != state.current) {
      if (system.transitions.has(state.current, chosen)) {
        TransitionResult result = system.transitions.apply(state.current, chosen, x, o, scores,
                                                           config.thresholds);
        decision = TransitionDecision{chosen, std::move(result), std::nullopt};
      } else {
        decision = make_alarm(config, state.current,
                              {ExceptionRecord::Kind::MissingTransition, {chosen},
                               "no transition from " + state.current.name() + " to " +
                                   chosen.name()});
      }
    }
  } else if (std::holds_alternative<PartialityOutcome>(outcome)) {
    next.alarm_log.push_back(
        {now, {ExceptionRecord::Kind::Partiality, {}, "no mode scores above p_low"}});
    decision = handle_partiality(config, scores, state.current, system, x, o);
  } else {
    const auto& c = std::get<ContradictionOutcome>(outcome);
    next.alarm_log.push_back({now,
                              {ExceptionRecord::Kind::Contradiction, c.support,
                               "support " + to_string(c.support) + " is not a simplex"}});
    queries.push_back(QueryTask::question("resolve contradiction " + to_string(c.support)));
    for (const auto& v : x.variables()) {
      queries.push_back(QueryTask::measure(v, kRequeryAccuracy, Priority::Urgent));
    }
    decision = handle_contradiction(config, c.support, scores, state.current, system, x, o);
  }

  if (const auto* alarm = std::get_if<Alarm>(&decision)) {
    next.alarm_log.push_back({now, alarm->record});
    if (queries.empty()) queries = requery_all(x);
  }

  if (auto to = target_of(decision)) {
    next.current = *to;
    next.mode_entry_time = now;
    const TransitionResult& r = std::holds_alternative<TransitionDecision>(decision)
                                    ? std::get<TransitionDecision>(decision).result
                                    : std::get<DegradedTransition>(decision).result;
    for (const auto& v : r.undefined_outputs) {
      queries.push_back(QueryTask::measure(v, kRequeryAccuracy, Priority::Urgent));
    }
  }

  return StepResult{std::move(decision), std::move(next), std::move(scores), std::move(outcome),
                    std::move(queries)};
}

std::vector<ModeId> modes_without_exit(const TransitionRegistry& transitions) {
  ModeSet entered;
  for (const auto& [from, to] : transitions.pairs()) entered.insert(to);
  std::vector<ModeId> out;
  for (const auto& m : entered) {
    if (transitions.targets_from(m).empty()) out.push_back(m);
  }
  return out;
}

}  // namespace modal
