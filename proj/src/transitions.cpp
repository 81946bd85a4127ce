#include "modal/transitions.hpp"

#include <algorithm>
#include <cmath>

#include "modal/error.hpp"

namespace modal {

void TransitionRegistry::add(const ModeId& from, const ModeId& to, TransitionMap map,
                             bool degraded_only) {
  entries_[{from, to}] = Entry{std::move(map), degraded_only};
}

bool TransitionRegistry::has(const ModeId& from, const ModeId& to) const {
  return entries_.count({from, to}) != 0;
}

bool TransitionRegistry::degraded_only(const ModeId& from, const ModeId& to) const {
  return entry(from, to).degraded_only;
}

std::vector<std::pair<ModeId, ModeId>> TransitionRegistry::pairs() const {
  std::vector<std::pair<ModeId, ModeId>> out;
  out.reserve(entries_.size());
  for (const auto& [key, e] : entries_) out.push_back(key);
  return out;
}

ModeSet TransitionRegistry::targets_from(const ModeId& from) const {
  ModeSet out;
  for (const auto& [key, e] : entries_) {
    if (key.first == from) out.insert(key.second);
  }
  return out;
}

const TransitionRegistry::Entry& TransitionRegistry::entry(const ModeId& from,
                                                           const ModeId& to) const {
  auto it = entries_.find({from, to});
  if (it == entries_.end()) {
    throw Error(ErrorCode::NoSuchTransition,
                "no transition registered from " + from.name() + " to " + to.name());
  }
  return it->second;
}

TransitionResult TransitionRegistry::apply(const ModeId& from, const ModeId& to,
                                           const ModeState& state, const Orders& orders,
                                           const ScoreVector& scores,
                                           const Thresholds& thresholds,
                                           bool degraded_override) const {
  const Entry& e = entry(from, to);
  if (!degraded_override && !(scores.at(to) > thresholds.p_low())) {
    throw Error(ErrorCode::GuardViolation,
                "score of " + to.name() + " does not exceed p_low");
  }
  TransitionOutput out = e.map(state, orders);
  auto undefined = out.state.undefined_variables();
  return TransitionResult{std::move(out.state), std::move(out.orders), std::move(undefined)};
}

namespace {

void compare_states(const ModeState& a, const ModeState& b, CompositionReport& report) {
  std::set<std::string> names;
  for (const auto& v : a.variables()) names.insert(v);
  for (const auto& v : b.variables()) names.insert(v);
  for (const auto& name : names) {
    auto ra = a.get(name);
    auto rb = b.get(name);
    if (ra && rb) {
      report.max_deviation = std::max(report.max_deviation, std::abs(ra->value - rb->value));
    } else if (ra || rb) {
      ++report.definedness_mismatches;
    }
  }
}

void compare_orders(const Orders& a, const Orders& b, CompositionReport& report) {
  std::set<std::string> names;
  for (const auto& [n, v] : a.directives()) names.insert(n);
  for (const auto& [n, v] : b.directives()) names.insert(n);
  for (const auto& name : names) {
    const OrderValue* va = a.find(name);
    const OrderValue* vb = b.find(name);
    if (!va || !vb) {
      ++report.order_mismatches;
      continue;
    }
    const double* da = std::get_if<double>(va);
    const double* db = std::get_if<double>(vb);
    if (da && db) {
      report.max_deviation = std::max(report.max_deviation, std::abs(*da - *db));
    } else if (*va != *vb) {
      ++report.order_mismatches;
    }
  }
}

}  // namespace

CompositionReport TransitionRegistry::check_composition(
    const ModeId& alpha, const ModeId& beta, const ModeId& gamma,
    const std::vector<CompositionSample>& samples, const ScoreFn& score_fn,
    const Thresholds& thresholds, double tolerance) const {
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidTolerance, "tolerance must be positive");
  const Entry& ba = entry(alpha, beta);
  const Entry& gb = entry(beta, gamma);
  const Entry& ga = entry(alpha, gamma);
  const double p_low = thresholds.p_low();

  CompositionReport report;
  report.tolerance = tolerance;
  for (const auto& sample : samples) {
    const ScoreVector from_alpha = score_fn(alpha, sample.state, sample.orders);
    if (!(from_alpha.at(beta) > p_low) || !(from_alpha.at(gamma) > p_low)) {
      ++report.skipped;
      continue;
    }
    const TransitionOutput mid = ba.map(sample.state, sample.orders);
    if (!(score_fn(beta, mid.state, mid.orders).at(gamma) > p_low)) {
      ++report.skipped;
      continue;
    }
    const TransitionOutput two_step = gb.map(mid.state, mid.orders);
    const TransitionOutput direct = ga.map(sample.state, sample.orders);
    compare_states(direct.state, two_step.state, report);
    compare_orders(direct.orders, two_step.orders, report);
    ++report.checked;
  }
  return report;
}

std::vector<TableWarning> TransitionRegistry::validate(const Nerve& nerve) const {
  std::vector<TableWarning> out;
  ModeSet entered;
  for (const auto& [key, e] : entries_) {
    const auto& [from, to] = key;
    entered.insert(to);
    const bool adjacent = nerve.is_simplex({from, to});
    if (!adjacent && !e.degraded_only) {
      out.push_back({TableWarning::Kind::NonAdjacent, from, to,
                     "transition " + from.name() + " -> " + to.name() +
                         " joins modes without a nerve edge"});
    }
  }
  for (const auto& mode : entered) {
    if (targets_from(mode).empty()) {
      out.push_back({TableWarning::Kind::NoOutgoing, mode, mode,
                     "mode " + mode.name() + " can be entered but has no outgoing transition"});
    }
  }
  return out;
}

TransitionMap copy_transition(std::vector<std::string> keep, std::vector<std::string> undefined) {
  return [keep = std::move(keep), undefined = std::move(undefined)](const ModeState& x,
                                                                     const Orders& o) {
    ModeState next = x;
    if (!keep.empty()) {
      for (const auto& name : x.variables()) {
        if (std::find(keep.begin(), keep.end(), name) == keep.end()) next.erase(name);
      }
    }
    for (const auto& name : undefined) next.mark_undefined(name);
    return TransitionOutput{std::move(next), o};
  };
}

}  // namespace modal
