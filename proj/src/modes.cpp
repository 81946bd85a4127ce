#include "modal/modes.hpp"

#include <cmath>

#include "modal/error.hpp"

namespace modal {

Thresholds::Thresholds(double p_low, double p_high) : p_low_(p_low), p_high_(p_high) {
  if (!(0.0 < p_low && p_low < p_high && p_high < 1.0)) {
    throw Error(ErrorCode::InvalidThresholds,
                "thresholds must satisfy 0 < p_low < p_high < 1");
  }
}

ModeState::ModeState(std::size_t history_length) : history_length_(history_length) {}

void ModeState::push_history(Slot& slot) {
  if (!slot.current || history_length_ == 0) return;
  slot.history.push_back(*slot.current);
  while (slot.history.size() > history_length_) slot.history.pop_front();
}

void ModeState::set(const std::string& variable, double value, double error_bound,
                    double timestamp) {
  if (!(error_bound >= 0.0)) {
    throw Error(ErrorCode::InvalidErrorBound, "error bound of " + variable + " must be >= 0");
  }
  Slot& slot = slots_[variable];
  if (slot.last_timestamp && timestamp < *slot.last_timestamp) {
    throw Error(ErrorCode::TimestampRegression,
                "timestamp of " + variable + " moved backwards");
  }
  push_history(slot);
  slot.current = Reading{value, error_bound, timestamp};
  slot.last_timestamp = timestamp;
}

void ModeState::mark_undefined(const std::string& variable) {
  Slot& slot = slots_[variable];
  push_history(slot);
  slot.current.reset();
}

void ModeState::erase(const std::string& variable) { slots_.erase(variable); }

bool ModeState::is_defined(const std::string& variable) const {
  auto it = slots_.find(variable);
  return it != slots_.end() && it->second.current.has_value();
}

std::optional<Reading> ModeState::get(const std::string& variable) const {
  auto it = slots_.find(variable);
  if (it == slots_.end()) return std::nullopt;
  return it->second.current;
}

double ModeState::value(const std::string& variable) const {
  auto r = get(variable);
  if (!r) throw Error(ErrorCode::ConfigInvalid, "state variable " + variable + " is undefined");
  return r->value;
}

const std::deque<Reading>& ModeState::history(const std::string& variable) const {
  static const std::deque<Reading> kEmpty;
  auto it = slots_.find(variable);
  return it == slots_.end() ? kEmpty : it->second.history;
}

std::vector<std::string> ModeState::variables() const {
  std::vector<std::string> out;
  out.reserve(slots_.size());
  for (const auto& [name, slot] : slots_) out.push_back(name);
  return out;
}

std::set<std::string> ModeState::undefined_variables() const {
  std::set<std::string> out;
  for (const auto& [name, slot] : slots_) {
    if (!slot.current) out.insert(name);
  }
  return out;
}

bool ModeState::operator==(const ModeState& other) const {
  if (slots_.size() != other.slots_.size()) return false;
  auto a = slots_.begin();
  auto b = other.slots_.begin();
  for (; a != slots_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.current != b->second.current) return false;
  }
  return true;
}

ModeState update_state(ModeState state, const std::string& variable, double value,
                       double error_bound, double timestamp) {
  state.set(variable, value, error_bound, timestamp);
  return state;
}

const OrderValue* Orders::find(const std::string& name) const {
  auto it = directives_.find(name);
  return it == directives_.end() ? nullptr : &it->second;
}

Orders Orders::merged_with(const Orders& overlay) const {
  Orders out = *this;
  for (const auto& [name, value] : overlay.directives_) out.directives_[name] = value;
  return out;
}

bool Orders::includes(const Orders& other) const {
  for (const auto& [name, value] : other.directives_) {
    const OrderValue* mine = find(name);
    if (!mine || *mine != value) return false;
  }
  return true;
}

ScoreVector::ScoreVector(std::map<ModeId, double> scores) : scores_(std::move(scores)) {
  for (const auto& [mode, s] : scores_) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorCode::ScoreOutOfRange, "score of " + mode.name() + " outside [0,1]");
    }
  }
}

double ScoreVector::at(const ModeId& mode) const {
  auto it = scores_.find(mode);
  if (it == scores_.end()) throw Error(ErrorCode::MissingScore, "no score for " + mode.name());
  return it->second;
}

void ScoreVector::require_total(const Nerve& nerve) const {
  for (const auto& v : nerve.vertices()) {
    if (!scores_.count(v)) throw Error(ErrorCode::MissingScore, "no score for " + v.name());
  }
}

std::optional<std::pair<ModeId, double>> ScoreVector::argmax() const {
  std::optional<std::pair<ModeId, double>> best;
  // std::map iterates in lexicographic order, so strict '>' keeps the smallest name.
  for (const auto& [mode, s] : scores_) {
    if (!best || s > best->second) best = std::make_pair(mode, s);
  }
  return best;
}

ModeSet ScoreVector::maximisers() const {
  ModeSet out;
  auto best = argmax();
  if (!best) return out;
  for (const auto& [mode, s] : scores_) {
    if (s == best->second) out.insert(mode);
  }
  return out;
}

OutcomeKind kind_of(const ClassificationOutcome& outcome) noexcept {
  return static_cast<OutcomeKind>(outcome.index());
}

std::string_view to_string(OutcomeKind kind) noexcept {
  switch (kind) {
    case OutcomeKind::Point: return "point";
    case OutcomeKind::Partiality: return "partiality";
    case OutcomeKind::Contradiction: return "contradiction";
  }
  return "unknown";
}

ClassificationOutcome classify(const ScoreVector& scores, const Thresholds& thresholds,
                               const Nerve& nerve) {
  scores.require_total(nerve);
  const double p_low = thresholds.p_low();

  ModeSet support;
  std::optional<std::pair<ModeId, double>> best;
  for (const auto& v : nerve.vertices()) {
    const double s = scores.at(v);
    if (s > p_low) support.insert(v);
    if (!best || s > best->second) best = std::make_pair(v, s);
  }

  if (support.empty()) return PartialityOutcome{best};

  if (!nerve.is_simplex(support)) {
    std::map<ModeId, double> restricted;
    for (const auto& v : nerve.vertices()) restricted.emplace(v, scores.at(v));
    return ContradictionOutcome{support, ScoreVector(std::move(restricted))};
  }

  double total = 0.0;
  for (const auto& m : support) total += scores.at(m) - p_low;
  std::map<ModeId, double> coords;
  for (const auto& m : support) coords.emplace(m, (scores.at(m) - p_low) / total);
  return PointOutcome{NervePoint(std::move(coords))};
}

void ModeRegistry::register_mode(const ModeId& mode, Evaluator evaluator) {
  if (evaluators_.count(mode)) throw Error(ErrorCode::DuplicateMode, "mode " + mode.name() + " already registered");
  if (!nerve_.has_vertex(mode)) {
    throw Error(ErrorCode::ModeNotInNerve, "mode " + mode.name() + " is not a nerve vertex");
  }
  evaluators_.emplace(mode, std::move(evaluator));
}

ModeSet ModeRegistry::modes() const {
  ModeSet out;
  for (const auto& [mode, e] : evaluators_) out.insert(mode);
  return out;
}

ScoreVector ModeRegistry::evaluate(const ModeId& current, const ModeState& state,
                                   const Orders& orders) const {
  auto it = evaluators_.find(current);
  if (it == evaluators_.end()) {
    throw Error(ErrorCode::UnknownMode, "no evaluator registered for " + current.name());
  }
  ScoreVector scores = it->second(current, state, orders);
  scores.require_total(nerve_);
  return scores;
}

}  // namespace modal
