#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "modal/oracle.hpp"
#include "modal/scenarios.hpp"
#include "modal/trace.hpp"

namespace modal::detail {

/// Uniform double in [0, 1) from raw engine bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<FaultWindow> faults_for(const std::vector<FaultSpec>& faults,
                                           const std::string& system) {
  std::vector<FaultWindow> out;
  for (const auto& f : faults) {
    if (f.system == "*" || f.system == system) out.push_back(f.window);
  }
  return out;
}

/// Folds a response into the picture. Responses for variables outside the
/// picture are dropped; timeouts mark the variable Undefined. Non-normal flags
/// are appended to `flags`.
inline void apply_response(ModeState& picture, const Response& r, std::vector<std::string>& flags) {
  if (r.flag != QualityFlag::Normal) {
    flags.push_back(std::string(to_string(r.flag)) + ":" + r.target);
  }
  if (!picture.has(r.target)) return;
  if (const auto* v = std::get_if<ValueOutcome>(&r.outcome)) {
    picture.set(r.target, v->interval.mid(), 0.5 * v->interval.width(), v->timestamp);
  } else if (std::holds_alternative<TimedOut>(r.outcome)) {
    picture.mark_undefined(r.target);
  }
}

inline void apply_responses(ModeState& picture, const std::vector<Response>& responses,
                            std::vector<std::string>& flags) {
  for (const auto& r : responses) apply_response(picture, r, flags);
}

/// The picture a decision leaves behind: the transition output when the mode
/// changed, otherwise the input picture.
inline const ModeState* produced_state(const Decision& d) {
  if (const auto* t = std::get_if<TransitionDecision>(&d)) return &t->result.state;
  if (const auto* g = std::get_if<DegradedTransition>(&d)) return &g->result.state;
  return nullptr;
}

inline const Orders* produced_orders(const Decision& d) {
  if (const auto* t = std::get_if<TransitionDecision>(&d)) return &t->result.orders;
  if (const auto* g = std::get_if<DegradedTransition>(&d)) return &g->result.orders;
  return nullptr;
}

}  // namespace modal::detail
