#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "modal/error.hpp"
#include "modal/scenarios.hpp"
#include "sim_support.hpp"

namespace modal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::string kCoordinate = "s";

/// Angle in (-pi, pi].
double wrap_angle(double a) {
  double r = std::fmod(a + std::numbers::pi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - std::numbers::pi;
}

}  // namespace

ModeId ChartAtlas::chart(std::size_t i) const { return ModeId("chart" + std::to_string(i)); }

std::size_t ChartAtlas::index_of(const ModeId& c) const {
  for (std::size_t i = 0; i < m; ++i) {
    if (chart(i) == c) return i;
  }
  throw Error(ErrorCode::UnknownMode, "not a chart: " + c.name());
}

double ChartAtlas::to_chart(std::size_t i, double angle) const { return wrap_angle(angle - centers[i]); }

double ChartAtlas::from_chart(std::size_t i, double s) const { return wrap_angle(s + centers[i]); }

bool ChartAtlas::in_chart(std::size_t i, double angle) const {
  return std::abs(to_chart(i, angle)) < half_width;
}

std::vector<double> ChartAtlas::partition(double angle) const {
  std::vector<double> bump(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    bump[i] = std::max(0.0, 1.0 - std::abs(to_chart(i, angle)) / half_width);
    total += bump[i];
  }
  for (auto& b : bump) b /= total;
  return bump;
}

ScoreVector ChartAtlas::scores_from(std::size_t from, double s) const {
  std::map<ModeId, double> out;
  const bool defined = std::abs(s) < half_width;
  const std::vector<double> theta = defined ? partition(from_chart(from, s)) : std::vector<double>(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) out.emplace(chart(i), theta[i]);
  return ScoreVector(std::move(out));
}

TransitionMap ChartAtlas::transition(std::size_t from, std::size_t to) const {
  const double shift = centers[from] - centers[to];
  return [shift](const ModeState& x, const Orders& o) {
    ModeState next = x;
    if (auto r = x.get(kCoordinate)) {
      next.set(kCoordinate, wrap_angle(r->value + shift), r->error_bound, r->timestamp);
    }
    return TransitionOutput{std::move(next), o};
  };
}

ChartAtlas build_atlas(std::size_t m) {
  if (m < 2) throw Error(ErrorCode::InvalidChartCount, "an atlas needs at least two charts");
  ChartAtlas atlas;
  atlas.m = m;
  const double spacing = kTwoPi / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) atlas.centers.push_back(wrap_angle(spacing * static_cast<double>(i)));
  // Wide enough that three charts can all exceed p_low = 1/(m+1) on a common arc (m >= 4).
  atlas.half_width = std::min(1.75 * spacing, 0.9 * std::numbers::pi);

  // Chart membership only changes at arc endpoints; sample between them.
  std::vector<double> cuts;
  for (double c : atlas.centers) {
    cuts.push_back(wrap_angle(c - atlas.half_width));
    cuts.push_back(wrap_angle(c + atlas.half_width));
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::vector<ModeId>> cover;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + kTwoPi;
    if (b - a < 1e-12) continue;
    const double mid = 0.5 * (a + b);
    std::vector<ModeId> members;
    for (std::size_t c = 0; c < m; ++c) {
      if (atlas.in_chart(c, mid)) members.push_back(atlas.chart(c));
    }
    cover.push_back(std::move(members));
  }
  std::vector<ModeId> vertices;
  for (std::size_t i = 0; i < m; ++i) vertices.push_back(atlas.chart(i));
  atlas.nerve = Nerve::build(vertices, cover);
  return atlas;
}

Evaluator atlas_evaluator(const ChartAtlas& atlas) {
  return [atlas](const ModeId& current, const ModeState& x, const Orders&) {
    const std::size_t from = atlas.index_of(current);
    auto r = x.get(kCoordinate);
    if (!r) {
      std::map<ModeId, double> zero;
      for (std::size_t i = 0; i < atlas.m; ++i) zero.emplace(atlas.chart(i), 0.0);
      return ScoreVector(std::move(zero));
    }
    return atlas.scores_from(from, r->value);
  };
}

TransitionRegistry atlas_transitions(const ChartAtlas& atlas) {
  TransitionRegistry out;
  for (std::size_t a = 0; a < atlas.m; ++a) {
    for (std::size_t b = 0; b < atlas.m; ++b) {
      if (a != b && atlas.nerve.is_simplex({atlas.chart(a), atlas.chart(b)})) {
        out.add(atlas.chart(a), atlas.chart(b), atlas.transition(a, b));
      }
    }
  }
  return out;
}

Thresholds ManifoldConfig::effective_thresholds() const {
  if (thresholds) return *thresholds;
  return Thresholds(1.0 / static_cast<double>(charts + 1), 0.6);
}

void ManifoldConfig::validate() const {
  if (charts < 2) throw Error(ErrorCode::InvalidChartCount, "an atlas needs at least two charts");
  if (!std::isfinite(angular_speed)) throw Error(ErrorCode::ConfigInvalid, "angular_speed must be finite");
  if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
  if (initial_angle && !std::isfinite(*initial_angle)) {
    throw Error(ErrorCode::ConfigInvalid, "initial_angle must be finite");
  }
  effective_thresholds();
}

Trace run_manifold(const ManifoldConfig& config, std::uint64_t seed, std::size_t steps) {
  config.validate();
  const ChartAtlas atlas = build_atlas(config.charts);
  SupervisorConfig sc = config.supervisor;
  sc.thresholds = config.effective_thresholds();
  sc.validate(atlas.nerve);

  std::mt19937_64 rng(seed);
  const double start = config.initial_angle.value_or(kTwoPi * detail::uniform01(rng));
  auto angle_at = [&](double t) { return wrap_angle(start + config.angular_speed * t); };

  ModeRegistry registry(atlas.nerve);
  const Evaluator evaluator = atlas_evaluator(atlas);
  for (std::size_t i = 0; i < atlas.m; ++i) registry.register_mode(atlas.chart(i), evaluator);
  const TransitionRegistry transitions = atlas_transitions(atlas);

  const std::vector<double> theta = atlas.partition(angle_at(0.0));
  SupervisorState sup;
  sup.current = atlas.chart(static_cast<std::size_t>(
      std::max_element(theta.begin(), theta.end()) - theta.begin()));
  ModeState picture;
  picture.mark_undefined(kCoordinate);
  const Orders orders;

  OracleConfig oc;
  oc.deadline = 0.0;
  oc.seed = seed + 1;
  oc.faults = detail::faults_for(config.faults, "point");
  oc.standing_tasks = {
      QueryTask{Repeat{config.dt}, Priority::Standard, Measure{kCoordinate, 1.0}, std::nullopt}};
  OracleInterface oracle(std::move(oc), [&](const std::string& name, double t) -> std::optional<double> {
    if (name != kCoordinate) return std::nullopt;
    return atlas.to_chart(atlas.index_of(sup.current), angle_at(t));
  });

  Trace trace;
  trace.header = {"manifold", seed, steps, sc.thresholds.p_low(), sc.thresholds.p_high()};
  trace.records.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double now = static_cast<double>(k) * config.dt;
    TraceRecord record;
    record.step = k;
    record.time = now;
    record.system = "point";
    detail::apply_responses(picture, oracle.poll(now), record.flags);
    const ModeId before = sup.current;
    StepResult r = step(sc, sup, picture, orders, ModeSystem{registry, transitions}, now);
    record_step(record, before, r);
    if (const ModeState* s = detail::produced_state(r.decision)) picture = *s;
    sup = std::move(r.state);
    for (const auto& q : r.queries) oracle.enqueue(q, now);
    detail::apply_responses(picture, oracle.poll(now), record.flags);
    record_state(record, picture);
    record.truth = {{"angle", angle_at(now)}};
    trace.records.push_back(std::move(record));
  }
  return trace;
}

}  // namespace modal
