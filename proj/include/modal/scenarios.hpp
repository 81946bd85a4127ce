#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modal/modes.hpp"
#include "modal/nerve.hpp"
#include "modal/oracle.hpp"
#include "modal/supervisor.hpp"
#include "modal/trace.hpp"
#include "modal/transitions.hpp"

namespace modal {

/// Fault window applied to the oracle of one supervised system ("*" = all).
struct FaultSpec {
  std::string system = "*";
  FaultWindow window;
};

// ---------------------------------------------------------------------------
// Chicane race: two cars on a circular track sharing a one-car chicane.

enum class ChicanePolicy { Autonomous, Communal, Priority };

std::string_view to_string(ChicanePolicy policy) noexcept;

struct ChicaneConfig {
  double track_length = 200.0;
  double chicane_center = 100.0;
  double chicane_half_width = 5.0;
  /// Distance from the chicane centre below which alpha scores exactly p_low.
  double stopping_distance = 20.0;
  /// Distance from which alpha scores 1.
  double ramp_distance = 40.0;
  double max_speed = 12.0;
  /// Deceleration available for stopping; also used as the acceleration.
  double braking_rate = 6.0;
  double dt = 0.1;
  /// Gap kept between a yielding car and the chicane entrance.
  double stop_margin = 0.5;
  /// Cruise speeds are drawn from [min_cruise_fraction, 1] * max_speed.
  double min_cruise_fraction = 0.6;
  ChicanePolicy policy = ChicanePolicy::Autonomous;
  SupervisorConfig supervisor{Thresholds{0.2, 0.9}};
  std::vector<FaultSpec> faults;

  /// Throws Error(ConfigInvalid) on inconsistent geometry or kinematics,
  /// including a stopping distance that braking from max_speed cannot honour.
  void validate() const;
};

inline constexpr std::size_t kChicaneDefaultSteps = 600;

/// Alpha score of a car at distance `x` from the chicane centre: p_low up to
/// d, linear up to 1 at d_ramp, 1 beyond.
double chicane_indicator_f(double x, double p_low, double d, double d_ramp);

Nerve chicane_nerve();

/// Two cars, modes "alpha" (own position and speed) and "beta" (both cars).
/// Records per step: one per car, systems "car1" and "car2".
Trace run_chicane(const ChicaneConfig& config, std::uint64_t seed, std::size_t steps);

// ---------------------------------------------------------------------------
// Solar system: three planets on concentric circular orbits, each with a
// monitoring node that tracks the others in detail only when they are close.

struct Orbit {
  double radius = 1.0;
  /// Angular speed in radians per time unit.
  double speed = 1.0;
  /// Initial angle; drawn from the seed when absent.
  std::optional<double> phase;
};

struct SolarConfig {
  std::array<Orbit, 3> orbits{Orbit{4.0, 1.0, std::nullopt}, Orbit{5.5, 0.6, std::nullopt},
                              Orbit{7.5, 0.35, std::nullopt}};
  double near = 2.5;
  double far = 5.0;
  double dt = 0.05;
  bool cooperation = true;
  double start_failure_probability = 0.1;
  /// Half-width of coarse position readings.
  double coarse_accuracy = 0.05;
  SupervisorConfig supervisor{Thresholds{0.1, 0.6}};
  std::vector<FaultSpec> faults;

  void validate() const;
};

inline constexpr std::size_t kSolarDefaultSteps = 1000;

/// 1 up to `near`, linear down to 0 at `far`, 0 beyond.
double solar_indicator(double distance, double near, double far);

/// Scores over (alpha, beta toward first, beta toward second, gamma toward
/// both) for closeness indicators of the two other planets.
std::array<double, 4> solar_eval(double w2, double w3);

/// Mode names of node `planet` (1-based): alpha{i}, beta{i}_{j}, beta{i}_{k}, gamma{i}_{jk}.
std::array<ModeId, 4> solar_modes(int planet);
/// Solid tetrahedron over solar_modes(planet).
Nerve solar_nerve(int planet);

Trace run_solar(const SolarConfig& config, std::uint64_t seed, std::size_t steps);

// ---------------------------------------------------------------------------
// Manifold: overlapping arcs covering the circle, with a partition of unity.

struct ChartAtlas {
  std::size_t m = 0;
  /// Arc centres and common half-width; chart i covers centre[i] +- half_width.
  std::vector<double> centers;
  double half_width = 0.0;
  Nerve nerve;

  ModeId chart(std::size_t i) const;
  std::size_t index_of(const ModeId& chart) const;
  /// Local coordinate of `angle` in chart i, in (-pi, pi].
  double to_chart(std::size_t i, double angle) const;
  double from_chart(std::size_t i, double s) const;
  bool in_chart(std::size_t i, double angle) const;
  /// Partition-of-unity weights at `angle`.
  std::vector<double> partition(double angle) const;
  /// Scores of every chart seen from chart `from` at local coordinate s.
  ScoreVector scores_from(std::size_t from, double s) const;
  /// Transition map from chart `from` to chart `to` for the variable "s".
  TransitionMap transition(std::size_t from, std::size_t to) const;
};

/// Throws Error(InvalidChartCount) for m < 2.
ChartAtlas build_atlas(std::size_t m);

/// Evaluator over the atlas (P_from(to) from the local coordinate "s").
Evaluator atlas_evaluator(const ChartAtlas& atlas);
/// Transitions between every pair of overlapping charts.
TransitionRegistry atlas_transitions(const ChartAtlas& atlas);

struct ManifoldConfig {
  std::size_t charts = 3;
  double angular_speed = 0.05;
  double dt = 1.0;
  /// Drawn from the seed when absent.
  std::optional<double> initial_angle;
  /// Thresholds default to p_low = 1/(m+1), p_high = 0.6 when absent.
  std::optional<Thresholds> thresholds;
  SupervisorConfig supervisor;
  std::vector<FaultSpec> faults;

  Thresholds effective_thresholds() const;
  void validate() const;
};

inline constexpr std::size_t kManifoldDefaultSteps = 1000;

Trace run_manifold(const ManifoldConfig& config, std::uint64_t seed, std::size_t steps);

// ---------------------------------------------------------------------------
// Custom: a declared nerve driven by a fixed score schedule.

struct ScheduleEntry {
  std::size_t from_step = 0;
  std::map<ModeId, double> scores;
};

struct TransitionSpec {
  ModeId from;
  ModeId to;
  bool degraded_only = false;
};

struct CustomConfig {
  Nerve nerve;
  /// Defaults to the first vertex.
  std::optional<ModeId> initial_mode;
  /// Declared pairs; each is a copy transition.
  std::vector<TransitionSpec> transitions;
  std::vector<ScheduleEntry> schedule;
  SupervisorConfig supervisor;
  std::vector<FaultSpec> faults;

  TransitionRegistry registry() const;
  void validate() const;
};

inline constexpr std::size_t kCustomDefaultSteps = 20;

Trace run_custom(const CustomConfig& config, std::uint64_t seed, std::size_t steps);

}  // namespace modal
