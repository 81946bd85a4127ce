#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "modal/nerve.hpp"

namespace modal {

/// Adequacy and quality thresholds, 0 < p_low < p_high < 1.
class Thresholds {
 public:
  /// Throws Error(InvalidThresholds) unless 0 < p_low < p_high < 1.
  Thresholds(double p_low, double p_high);

  double p_low() const noexcept { return p_low_; }
  double p_high() const noexcept { return p_high_; }

 private:
  double p_low_;
  double p_high_;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool operator==(const Interval&) const = default;
};

/// A defined value of a state variable: centre, error half-width and the time
/// of the observation or estimate.
struct Reading {
  double value = 0.0;
  double error_bound = 0.0;
  double timestamp = 0.0;

  Interval interval() const noexcept { return {value - error_bound, value + error_bound}; }
  bool operator==(const Reading&) const = default;
};

/// Partial valuation of named state variables. A variable is either a Reading
/// or explicitly Undefined; superseded readings go to a bounded history.
class ModeState {
 public:
  static constexpr std::size_t kDefaultHistory = 8;

  explicit ModeState(std::size_t history_length = kDefaultHistory);

  /// Throws Error(InvalidErrorBound) or Error(TimestampRegression).
  void set(const std::string& variable, double value, double error_bound, double timestamp);
  void set(const std::string& variable, const Reading& reading) {
    set(variable, reading.value, reading.error_bound, reading.timestamp);
  }
  /// Declares the variable (if needed) and marks it Undefined. The previous
  /// reading, if any, moves into history.
  void mark_undefined(const std::string& variable);
  /// Drops the variable together with its history.
  void erase(const std::string& variable);

  bool has(const std::string& variable) const { return slots_.count(variable) != 0; }
  bool is_defined(const std::string& variable) const;
  /// Reading of a defined variable; nullopt when Undefined or not declared.
  std::optional<Reading> get(const std::string& variable) const;
  /// Value of a defined variable. Throws Error(ConfigInvalid) otherwise.
  double value(const std::string& variable) const;
  const std::deque<Reading>& history(const std::string& variable) const;

  std::vector<std::string> variables() const;
  std::set<std::string> undefined_variables() const;
  std::size_t history_length() const noexcept { return history_length_; }

  /// Equal when the current valuations agree; history is not compared.
  bool operator==(const ModeState& other) const;

 private:
  struct Slot {
    std::optional<Reading> current;
    std::optional<double> last_timestamp;
    std::deque<Reading> history;
  };

  void push_history(Slot& slot);

  std::size_t history_length_;
  std::map<std::string, Slot> slots_;
};

/// Value-semantics form of ModeState::set.
ModeState update_state(ModeState state, const std::string& variable, double value,
                       double error_bound, double timestamp);

using OrderValue = std::variant<bool, double, std::string>;

/// Standing orders: named directives such as set-points or prohibitions.
class Orders {
 public:
  Orders() = default;
  Orders(std::initializer_list<std::pair<const std::string, OrderValue>> init)
      : directives_(init) {}

  void set(const std::string& name, OrderValue value) { directives_[name] = std::move(value); }
  bool has(const std::string& name) const { return directives_.count(name) != 0; }
  const OrderValue* find(const std::string& name) const;
  const std::map<std::string, OrderValue>& directives() const noexcept { return directives_; }
  bool empty() const noexcept { return directives_.empty(); }

  /// Directives of `overlay` win on name clashes.
  Orders merged_with(const Orders& overlay) const;
  /// True iff every directive of `other` is present here with an equal value.
  bool includes(const Orders& other) const;

  bool operator==(const Orders&) const = default;

 private:
  std::map<std::string, OrderValue> directives_;
};

/// Evaluation scores in [0,1] keyed by mode.
class ScoreVector {
 public:
  ScoreVector() = default;
  /// Throws Error(ScoreOutOfRange) for values outside [0,1] or NaN.
  explicit ScoreVector(std::map<ModeId, double> scores);

  double at(const ModeId& mode) const;
  bool has(const ModeId& mode) const { return scores_.count(mode) != 0; }
  const std::map<ModeId, double>& values() const noexcept { return scores_; }
  /// Throws Error(MissingScore) unless every vertex of the nerve has a score.
  void require_total(const Nerve& nerve) const;
  /// Highest score, ties broken towards the lexicographically smallest mode.
  std::optional<std::pair<ModeId, double>> argmax() const;
  /// Modes whose score equals the maximum.
  ModeSet maximisers() const;

  bool operator==(const ScoreVector&) const = default;

 private:
  std::map<ModeId, double> scores_;
};

struct PointOutcome {
  NervePoint point;
};

/// No mode scores above p_low. `best` is the maximal sub-threshold candidate.
struct PartialityOutcome {
  std::optional<std::pair<ModeId, double>> best;
};

/// The adequately scoring modes do not form a simplex.
struct ContradictionOutcome {
  ModeSet support;
  ScoreVector scores;
};

using ClassificationOutcome = std::variant<PointOutcome, PartialityOutcome, ContradictionOutcome>;

enum class OutcomeKind { Point, Partiality, Contradiction };

OutcomeKind kind_of(const ClassificationOutcome& outcome) noexcept;
std::string_view to_string(OutcomeKind kind) noexcept;

/// Maps scores to a barycentric point of the nerve, or reports partiality or
/// contradiction. Support is {m : score(m) > p_low}; coordinates are the
/// normalized excesses over p_low. Only nerve vertices are considered.
/// Throws Error(MissingScore) when a vertex has no score.
ClassificationOutcome classify(const ScoreVector& scores, const Thresholds& thresholds,
                               const Nerve& nerve);

/// (current mode, state, orders) -> scores over the whole portfolio. Must be pure.
using Evaluator = std::function<ScoreVector(const ModeId&, const ModeState&, const Orders&)>;

/// Fixed mode portfolio: the nerve plus one evaluator per mode.
class ModeRegistry {
 public:
  explicit ModeRegistry(Nerve nerve) : nerve_(std::move(nerve)) {}

  /// Throws Error(DuplicateMode) or Error(ModeNotInNerve).
  void register_mode(const ModeId& mode, Evaluator evaluator);

  bool has_mode(const ModeId& mode) const { return evaluators_.count(mode) != 0; }
  const Nerve& nerve() const noexcept { return nerve_; }
  ModeSet modes() const;

  /// Runs the evaluator of `current`. Throws Error(UnknownMode) when no
  /// evaluator is registered and Error(MissingScore) for non-total output.
  ScoreVector evaluate(const ModeId& current, const ModeState& state, const Orders& orders) const;

 private:
  Nerve nerve_;
  std::map<ModeId, Evaluator> evaluators_;
};

}  // namespace modal
