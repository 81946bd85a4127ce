#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modal/modes.hpp"
#include "modal/oracle.hpp"
#include "modal/transitions.hpp"

namespace modal {

struct Hawk {};
struct Dove {};
struct FailSafe {
  ModeId safe_mode;
};
struct Consensus {};
using ContradictionStrategy = std::variant<Hawk, Dove, FailSafe, Consensus>;

std::string_view strategy_name(const ContradictionStrategy& strategy) noexcept;

struct SupervisorConfig {
  SupervisorConfig() = default;
  explicit SupervisorConfig(Thresholds t) : thresholds(t) {}

  Thresholds thresholds{0.2, 0.9};
  /// Number of recent nerve points used for trend tie-breaking.
  std::size_t history_window = 3;
  ContradictionStrategy strategy = Dove{};
  /// Substitute orders used when a mode runs despite being unreliable.
  std::map<ModeId, Orders> safety_orders;
  /// Orders for a specific contradictory support, keyed by the support set.
  std::map<ModeSet, Orders> consensus_orders;
  /// Partiality ranking penalty per edge of 1-skeleton distance.
  double bias_weight = 0.05;

  /// safety_orders[mode], or a lone "degraded" directive when none is configured.
  Orders safety_for(const ModeId& mode) const;
  /// Throws Error(ConfigInvalid) for k = 0 or a FailSafe mode outside the nerve.
  void validate(const Nerve& nerve) const;
};

struct ExceptionRecord {
  enum class Kind { Partiality, Contradiction, MissingTransition };
  Kind kind;
  ModeSet support;
  std::string detail;
};

std::string_view to_string(ExceptionRecord::Kind kind) noexcept;

struct AlarmEntry {
  double time = 0.0;
  ExceptionRecord record;
};

struct SupervisorState {
  ModeId current;
  std::deque<NervePoint> recent_points;
  double mode_entry_time = 0.0;
  std::vector<AlarmEntry> alarm_log;
};

struct Stay {
  /// Orders imposed without changing mode (safety or consensus orders).
  std::optional<Orders> imposed_orders;
};

struct TransitionDecision {
  ModeId to;
  TransitionResult result;
  /// Safety or consensus orders merged into result.orders, if any.
  std::optional<Orders> imposed_orders;
};

struct DegradedTransition {
  ModeId to;
  Orders safety_orders;
  TransitionResult result;
};

struct Alarm {
  ExceptionRecord record;
  std::string holding_action;
  Orders holding_orders;
};

using Decision = std::variant<Stay, TransitionDecision, DegradedTransition, Alarm>;

enum class DecisionKind { Stay, Transition, Degraded, Alarm };
DecisionKind kind_of(const Decision& decision) noexcept;
std::string_view to_string(DecisionKind kind) noexcept;
/// Target mode of a transition or degraded transition.
std::optional<ModeId> target_of(const Decision& decision);

struct StepResult {
  Decision decision;
  SupervisorState state;
  ScoreVector scores;
  /// Classification of the scores; computed even when the current mode is
  /// good enough to stay, so traces and trend history stay complete.
  ClassificationOutcome outcome;
  /// Information requests raised by the decision, highest priority first.
  std::vector<QueryTask> queries;
};

/// Everything the decision step needs about the mode system.
struct ModeSystem {
  const ModeRegistry& modes;
  const TransitionRegistry& transitions;
  const Nerve& nerve() const noexcept { return modes.nerve(); }
};

/// Decides whether to stay, change mode, or raise an alarm for one control
/// period. Pure: the input state is not modified.
StepResult step(const SupervisorConfig& config, const SupervisorState& state,
                const ModeState& x, const Orders& o, const ModeSystem& system, double now);

/// Picks the candidate the recent points are moving towards.
ModeId tie_break(const ModeSet& candidates, const std::deque<NervePoint>& history,
                 const ModeId& current);

Decision handle_partiality(const SupervisorConfig& config, const ScoreVector& scores,
                           const ModeId& current, const ModeSystem& system, const ModeState& x,
                           const Orders& o);

Decision handle_contradiction(const SupervisorConfig& config, const ModeSet& support,
                              const ScoreVector& scores, const ModeId& current,
                              const ModeSystem& system, const ModeState& x, const Orders& o);

/// Static configuration check: every mode reachable by a transition can be left again.
std::vector<ModeId> modes_without_exit(const TransitionRegistry& transitions);

}  // namespace modal
