#include <cmath>
#include <memory>
#include <numbers>

#include "modal/error.hpp"
#include "modal/scenarios.hpp"
#include "sim_support.hpp"

namespace modal {

namespace {

constexpr double kVelocityAccuracy = 0.01;

std::string var(const char* prefix, int planet) { return prefix + std::to_string(planet); }

struct Node {
  int planet = 0;
  std::string name;
  std::array<int, 2> others{};
  std::array<ModeId, 4> modes;
  std::unique_ptr<ModeRegistry> registry;
  TransitionRegistry transitions;
  SupervisorState sup;
  ModeState picture;
  Orders orders;
  std::unique_ptr<OracleInterface> oracle;
  TraceRecord record;
  bool stayed = false;

  /// Planets tracked in detail by a mode: none, one of the others, or both.
  std::vector<int> tracked(const ModeId& mode) const {
    if (mode == modes[1]) return {others[0]};
    if (mode == modes[2]) return {others[1]};
    if (mode == modes[3]) return {others[0], others[1]};
    return {};
  }
  bool tracks(const ModeId& mode, int p) const {
    for (int t : tracked(mode)) {
      if (t == p) return true;
    }
    return false;
  }
};

struct Pair {
  int a;
  int b;
  bool active = false;
  /// A failed start is not retried until the pair leaves its beta modes.
  bool failed = false;
};

struct Sky {
  const SolarConfig& config;
  std::array<double, 3> phase{};

  double angle(int p, double t) const { return config.orbits[p - 1].speed * t + phase[p - 1]; }
  double x(int p, double t) const { return config.orbits[p - 1].radius * std::cos(angle(p, t)); }
  double y(int p, double t) const { return config.orbits[p - 1].radius * std::sin(angle(p, t)); }
  double vx(int p, double t) const {
    const Orbit& o = config.orbits[p - 1];
    return -o.radius * o.speed * std::sin(angle(p, t));
  }
  double vy(int p, double t) const {
    const Orbit& o = config.orbits[p - 1];
    return o.radius * o.speed * std::cos(angle(p, t));
  }
  double distance(int p, int q, double t) const { return std::hypot(x(p, t) - x(q, t), y(p, t) - y(q, t)); }

  std::optional<double> read(const std::string& name, double t) const {
    const int p = name.back() - '0';
    if (p < 1 || p > 3) return std::nullopt;
    const std::string kind = name.substr(0, name.size() - 1);
    if (kind == "x") return x(p, t);
    if (kind == "y") return y(p, t);
    if (kind == "vx") return vx(p, t);
    if (kind == "vy") return vy(p, t);
    return std::nullopt;
  }
};

double picture_distance(const ModeState& x, int p, int q) {
  auto xp = x.get(var("x", p)), yp = x.get(var("y", p));
  auto xq = x.get(var("x", q)), yq = x.get(var("y", q));
  if (!xp || !yp || !xq || !yq) return INFINITY;
  return std::hypot(xp->value - xq->value, yp->value - yq->value);
}

TransitionMap solar_transition(const Node& node, const ModeId& from, const ModeId& to) {
  std::vector<std::string> undefine;
  std::vector<std::string> drop;
  for (int p : node.others) {
    const bool before = node.tracks(from, p);
    const bool after = node.tracks(to, p);
    if (after && !before) {
      undefine.push_back(var("vx", p));
      undefine.push_back(var("vy", p));
    } else if (!after && before) {
      drop.push_back(var("vx", p));
      drop.push_back(var("vy", p));
    }
  }
  return [undefine, drop](const ModeState& x, const Orders& o) {
    ModeState next = x;
    for (const auto& v : drop) next.erase(v);
    for (const auto& v : undefine) next.mark_undefined(v);
    return TransitionOutput{std::move(next), o};
  };
}

/// Shares the detailed picture of each planet in a merged pair with the other node.
void exchange(Node& a, Node& b, const Sky& sky, double now) {
  for (auto [self, partner] : {std::pair<Node*, Node*>{&a, &b}, {&b, &a}}) {
    const int p = partner->planet;
    if (!self->tracks(self->sup.current, p)) continue;
    self->picture.set(var("vx", p), sky.vx(p, now), 0.0, now);
    self->picture.set(var("vy", p), sky.vy(p, now), 0.0, now);
  }
}

}  // namespace

void SolarConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  for (const auto& o : orbits) {
    if (!(o.radius > 0.0)) fail("orbit radii must be positive");
    if (!std::isfinite(o.speed)) fail("orbit speeds must be finite");
    if (o.phase && !std::isfinite(*o.phase)) fail("orbit phases must be finite");
  }
  if (!(0.0 <= near && near < far)) fail("need 0 <= near < far");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(start_failure_probability >= 0.0 && start_failure_probability <= 1.0)) {
    fail("start_failure_probability must be in [0, 1]");
  }
  if (!(coarse_accuracy >= 0.0)) fail("coarse_accuracy must be non-negative");
  supervisor.validate(solar_nerve(1));
}

double solar_indicator(double distance, double near, double far) {
  if (distance <= near) return 1.0;
  if (distance >= far) return 0.0;
  return (far - distance) / (far - near);
}

std::array<double, 4> solar_eval(double w2, double w3) {
  return {(1.0 - w2) * (1.0 - w3), w2 * (1.0 - w3), (1.0 - w2) * w3, w2 * w3};
}

std::array<ModeId, 4> solar_modes(int planet) {
  if (planet < 1 || planet > 3) throw Error(ErrorCode::ConfigInvalid, "planet index must be 1, 2 or 3");
  int j = planet == 1 ? 2 : 1;
  int k = planet == 3 ? 2 : 3;
  const std::string i = std::to_string(planet);
  return {ModeId("alpha" + i), ModeId("beta" + i + "_" + std::to_string(j)),
          ModeId("beta" + i + "_" + std::to_string(k)),
          ModeId("gamma" + i + "_" + std::to_string(j) + std::to_string(k))};
}

Nerve solar_nerve(int planet) {
  auto m = solar_modes(planet);
  return Nerve::build({{m[0], m[1], m[2], m[3]}});
}

Trace run_solar(const SolarConfig& config, std::uint64_t seed, std::size_t steps) {
  config.validate();
  std::mt19937_64 rng(seed);
  Sky sky{config, {}};
  for (int p = 0; p < 3; ++p) {
    const double drawn = 2.0 * std::numbers::pi * detail::uniform01(rng);
    sky.phase[p] = config.orbits[p].phase.value_or(drawn);
  }

  std::array<Node, 3> nodes;
  for (int i = 0; i < 3; ++i) {
    Node& n = nodes[i];
    n.planet = i + 1;
    n.name = "node" + std::to_string(n.planet);
    n.others = {n.planet == 1 ? 2 : 1, n.planet == 3 ? 2 : 3};
    n.modes = solar_modes(n.planet);
    n.registry = std::make_unique<ModeRegistry>(solar_nerve(n.planet));
    auto evaluator = [planet = n.planet, others = n.others, modes = n.modes, &config](
                         const ModeId&, const ModeState& x, const Orders&) {
      const double w2 = solar_indicator(picture_distance(x, planet, others[0]), config.near, config.far);
      const double w3 = solar_indicator(picture_distance(x, planet, others[1]), config.near, config.far);
      const auto s = solar_eval(w2, w3);
      return ScoreVector({{modes[0], s[0]}, {modes[1], s[1]}, {modes[2], s[2]}, {modes[3], s[3]}});
    };
    for (const auto& m : n.modes) n.registry->register_mode(m, evaluator);
    for (const auto& from : n.modes) {
      for (const auto& to : n.modes) {
        if (from != to) n.transitions.add(from, to, solar_transition(n, from, to));
      }
    }
    n.sup.current = n.modes[0];
    n.orders = Orders{{"track_detail", false}};

    OracleConfig oc;
    oc.deadline = 0.0;
    oc.default_accuracy = config.coarse_accuracy;
    oc.seed = seed + static_cast<std::uint64_t>(i) + 1;
    oc.faults = detail::faults_for(config.faults, n.name);
    for (int p = 1; p <= 3; ++p) {
      for (const char* axis : {"x", "y"}) {
        n.picture.mark_undefined(var(axis, p));
        oc.standing_tasks.push_back(
            QueryTask{Repeat{config.dt}, Priority::Standard, Measure{var(axis, p), 1.0}, std::nullopt});
      }
      oc.channels[var("vx", p)] = Channel{0.0, kVelocityAccuracy};
      oc.channels[var("vy", p)] = Channel{0.0, kVelocityAccuracy};
    }
    n.oracle = std::make_unique<OracleInterface>(
        std::move(oc), [&sky](const std::string& name, double t) { return sky.read(name, t); });
  }

  std::vector<Pair> pairs{{1, 2}, {1, 3}, {2, 3}};
  auto beta_toward = [&nodes](int i, int j) { return nodes[i - 1].tracked(nodes[i - 1].sup.current) == std::vector<int>{j}; };

  Trace trace;
  trace.header = {"solar", seed, steps, config.supervisor.thresholds.p_low(),
                  config.supervisor.thresholds.p_high()};
  trace.records.reserve(3 * steps);

  for (std::size_t k = 0; k < steps; ++k) {
    const double now = static_cast<double>(k) * config.dt;
    for (auto& n : nodes) {
      n.record = TraceRecord{};
      n.record.step = k;
      n.record.time = now;
      n.record.system = n.name;
      detail::apply_responses(n.picture, n.oracle->poll(now), n.record.flags);
    }
    for (auto& n : nodes) {
      const ModeId before = n.sup.current;
      StepResult r = step(config.supervisor, n.sup, n.picture, n.orders,
                          ModeSystem{*n.registry, n.transitions}, now);
      record_step(n.record, before, r);
      n.stayed = std::holds_alternative<Stay>(r.decision);
      if (const ModeState* s = detail::produced_state(r.decision)) n.picture = *s;
      if (const Orders* o = detail::produced_orders(r.decision)) n.orders = *o;
      n.sup = std::move(r.state);
      for (const auto& q : r.queries) n.oracle->enqueue(q, now);
      for (int p : n.tracked(n.sup.current)) {
        n.oracle->enqueue(QueryTask::measure(var("vx", p), 1.0), now);
        n.oracle->enqueue(QueryTask::measure(var("vy", p), 1.0), now);
      }
    }
    for (auto& n : nodes) detail::apply_responses(n.picture, n.oracle->poll(now), n.record.flags);

    for (auto& pair : pairs) {
      Node& a = nodes[pair.a - 1];
      Node& b = nodes[pair.b - 1];
      const bool in_pair = beta_toward(pair.a, pair.b) && beta_toward(pair.b, pair.a);
      if (pair.active) {
        if (in_pair && a.stayed && b.stayed) {
          exchange(a, b, sky, now);
          a.record.decision = "merged";
          b.record.decision = "merged";
        } else {
          // Hand control back with both pictures brought up to date.
          exchange(a, b, sky, now);
          pair.active = false;
          a.record.events.push_back("merge_exit");
          b.record.events.push_back("merge_exit");
        }
      } else if (in_pair && config.cooperation && !pair.failed) {
        if (detail::uniform01(rng) < config.start_failure_probability) {
          pair.failed = true;
          a.record.events.push_back("merge_failed");
          b.record.events.push_back("merge_failed");
        } else {
          pair.active = true;
          exchange(a, b, sky, now);
          a.record.events.push_back("merge_start");
          b.record.events.push_back("merge_start");
        }
      }
      if (!in_pair) pair.failed = false;
    }

    for (auto& n : nodes) {
      record_state(n.record, n.picture);
      n.record.truth = {{var("d", n.others[0]), sky.distance(n.planet, n.others[0], now)},
                        {var("d", n.others[1]), sky.distance(n.planet, n.others[1], now)}};
      trace.records.push_back(std::move(n.record));
    }
  }
  return trace;
}

}  // namespace modal
