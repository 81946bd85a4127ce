#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modal/modes.hpp"

namespace modal {

/// Output of a transition map: the target mode's picture and orders.
struct TransitionOutput {
  ModeState state;
  Orders orders;
};

/// Result of applying a transition; `undefined_outputs` lists exactly the
/// Undefined variables of the produced state.
struct TransitionResult {
  ModeState state;
  Orders orders;
  std::set<std::string> undefined_outputs;
};

using TransitionMap = std::function<TransitionOutput(const ModeState&, const Orders&)>;

/// (viewpoint mode, state, orders) -> scores; used for composition guards.
using ScoreFn = std::function<ScoreVector(const ModeId&, const ModeState&, const Orders&)>;

struct CompositionSample {
  ModeState state;
  Orders orders;
};

struct CompositionReport {
  double max_deviation = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  /// Variables defined in one composed result but Undefined (or absent) in the other.
  std::size_t definedness_mismatches = 0;
  /// Discrete directives that differ between the two routes.
  std::size_t order_mismatches = 0;
  double tolerance = 0.0;

  bool consistent() const noexcept {
    return max_deviation <= tolerance && order_mismatches == 0;
  }
};

struct TableWarning {
  enum class Kind { NonAdjacent, NoOutgoing };
  Kind kind;
  ModeId from;
  ModeId to;
  std::string message;
};

/// Guarded partial mode-transition maps keyed by (from, to).
class TransitionRegistry {
 public:
  /// Replaces an existing entry for the same pair. `degraded_only` marks a
  /// transition intended for partiality handling between non-adjacent modes.
  void add(const ModeId& from, const ModeId& to, TransitionMap map, bool degraded_only = false);

  bool has(const ModeId& from, const ModeId& to) const;
  bool degraded_only(const ModeId& from, const ModeId& to) const;
  std::vector<std::pair<ModeId, ModeId>> pairs() const;
  ModeSet targets_from(const ModeId& from) const;

  /// Applies the map when score(to) > p_low, or unconditionally with
  /// `degraded_override`. Throws Error(NoSuchTransition) or Error(GuardViolation).
  TransitionResult apply(const ModeId& from, const ModeId& to, const ModeState& state,
                         const Orders& orders, const ScoreVector& scores,
                         const Thresholds& thresholds, bool degraded_override = false) const;

  /// Compares the direct route from->... with the two-step route through `via`
  /// on samples where all three guards hold. Throws Error(NoSuchTransition)
  /// for missing entries and Error(InvalidTolerance) for tolerance <= 0.
  CompositionReport check_composition(const ModeId& alpha, const ModeId& beta,
                                      const ModeId& gamma,
                                      const std::vector<CompositionSample>& samples,
                                      const ScoreFn& score_fn, const Thresholds& thresholds,
                                      double tolerance) const;

  /// Configuration checks: transitions joining modes without a nerve edge
  /// (unless degraded-only), and modes entered by some transition but with no
  /// outgoing transition.
  std::vector<TableWarning> validate(const Nerve& nerve) const;

 private:
  struct Entry {
    TransitionMap map;
    bool degraded_only = false;
  };
  const Entry& entry(const ModeId& from, const ModeId& to) const;

  std::map<std::pair<ModeId, ModeId>, Entry> entries_;
};

/// Transition map that copies the state, keeping only `keep` (all when empty)
/// and marking `undefined` variables as Undefined.
TransitionMap copy_transition(std::vector<std::string> keep = {},
                              std::vector<std::string> undefined = {});

}  // namespace modal
