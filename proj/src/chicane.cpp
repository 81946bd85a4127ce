#include <algorithm>
#include <cmath>
#include <memory>
#include <tuple>

#include "modal/error.hpp"
#include "modal/scenarios.hpp"
#include "sim_support.hpp"

namespace modal {

namespace {

const ModeId kAlpha{"alpha"};
const ModeId kBeta{"beta"};
constexpr double kCommitSlack = 1e-6;

double wrap(double q, double length) {
  double r = std::fmod(q, length);
  if (r < 0.0) r += length;
  return r;
}

class Track {
 public:
  explicit Track(const ChicaneConfig& c) : c_(c) {}

  double distance_to_centre(double q) const {
    const double d = wrap(q - c_.chicane_center, c_.track_length);
    return std::min(d, c_.track_length - d);
  }
  bool inside(double q) const { return distance_to_centre(q) <= c_.chicane_half_width; }
  /// Forward distance to the chicane entrance.
  double to_entrance(double q) const {
    return wrap(c_.chicane_center - c_.chicane_half_width - q, c_.track_length);
  }
  bool approaching(double q) const {
    return !inside(q) && to_entrance(q) < 0.5 * c_.track_length;
  }
  /// True when the car can no longer stop before the stop line.
  bool committed(double q, double v) const {
    if (!approaching(q)) return false;
    const double room = std::max(0.0, to_entrance(q) - c_.stop_margin);
    return v * v > 2.0 * c_.braking_rate * room + kCommitSlack;
  }
  double stop_line() const {
    return wrap(c_.chicane_center - c_.chicane_half_width - c_.stop_margin, c_.track_length);
  }

 private:
  const ChicaneConfig& c_;
};

struct Car {
  int index = 0;
  std::string name;
  std::string q, v, other_q, other_v;
  double pos = 0.0;
  double speed = 0.0;
  double cruise = 0.0;
  SupervisorState sup;
  ModeState picture;
  Orders orders;
  std::unique_ptr<ModeRegistry> modes;
  TransitionRegistry transitions;
  std::unique_ptr<OracleInterface> oracle;
  /// Latest request for the other car came back unanswered with no fault:
  /// under the communal policy the other car is not near the chicane.
  bool other_absent = false;
  TraceRecord record;
};

void note_other(Car& car, const std::vector<Response>& responses) {
  for (const auto& r : responses) {
    if (r.target != car.other_q) continue;
    car.other_absent = std::holds_alternative<TimedOut>(r.outcome) && r.flag == QualityFlag::Normal;
  }
}

enum class Plan { Proceed, Yield, Brake };

struct Contender {
  bool inside;
  bool committed;
  double order;
  int index;
  auto key() const { return std::make_tuple(!inside, !committed, order, index); }
};

Plan plan_for(const ChicaneConfig& c, const Track& track, const Car& me, const Car& other_truth) {
  auto q = me.picture.get(me.q);
  auto v = me.picture.get(me.v);
  if (!q || !v) return Plan::Brake;
  if (me.sup.current != kBeta || !track.approaching(q->value)) return Plan::Proceed;

  const bool me_committed = track.committed(q->value, v->value);
  auto oq = me.picture.get(me.other_q);
  auto ov = me.picture.get(me.other_v);

  if (!oq || !ov) {
    if (c.policy == ChicanePolicy::Communal && me.other_absent) return Plan::Proceed;
    return me_committed ? Plan::Proceed : Plan::Yield;
  }
  if (c.policy == ChicanePolicy::Priority && other_truth.sup.current != kBeta) {
    return Plan::Proceed;
  }
  const bool other_inside = track.inside(oq->value);
  if (!other_inside && !track.approaching(oq->value)) return Plan::Proceed;

  const bool by_index = c.policy == ChicanePolicy::Priority;
  Contender mine{false, me_committed, by_index ? 0.0 : track.to_entrance(q->value), me.index};
  Contender theirs{other_inside, track.committed(oq->value, ov->value),
                   by_index ? 0.0 : track.to_entrance(oq->value), other_truth.index};
  if (mine.key() < theirs.key()) return Plan::Proceed;
  return me_committed ? Plan::Proceed : Plan::Yield;
}

void integrate(const ChicaneConfig& c, const Track& track, Car& car, Plan plan) {
  const double dt = c.dt;
  const double a = c.braking_rate;
  double v = car.speed;
  switch (plan) {
    case Plan::Proceed: {
      const double next = v < car.cruise ? std::min(car.cruise, v + a * dt)
                                         : std::max(car.cruise, v - a * dt);
      car.pos += 0.5 * (v + next) * dt;
      car.speed = next;
      break;
    }
    case Plan::Brake: {
      const double next = std::max(0.0, v - a * dt);
      car.pos += 0.5 * (v + next) * dt;
      car.speed = next;
      break;
    }
    case Plan::Yield: {
      const double room = track.to_entrance(car.pos) - c.stop_margin;
      if (room <= 0.0 || v <= 0.0) {
        car.speed = 0.0;
        break;
      }
      const double decel = v * v / (2.0 * room);
      if (v - decel * dt <= 0.0) {
        car.pos = track.stop_line();
        car.speed = 0.0;
      } else {
        car.pos += v * dt - 0.5 * decel * dt * dt;
        car.speed = v - decel * dt;
      }
      break;
    }
  }
  car.pos = wrap(car.pos, c.track_length);
}

std::string_view plan_name(Plan p) {
  switch (p) {
    case Plan::Proceed: return "proceed";
    case Plan::Yield: return "yield";
    case Plan::Brake: return "brake";
  }
  return "proceed";
}

}  // namespace

std::string_view to_string(ChicanePolicy policy) noexcept {
  switch (policy) {
    case ChicanePolicy::Autonomous: return "autonomous";
    case ChicanePolicy::Communal: return "communal";
    case ChicanePolicy::Priority: return "priority";
  }
  return "autonomous";
}

void ChicaneConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (!(track_length > 0.0)) fail("track_length must be positive");
  if (!(chicane_half_width > 0.0)) fail("chicane_half_width must be positive");
  if (!(chicane_center - chicane_half_width >= 0.0 &&
        chicane_center + chicane_half_width <= track_length)) {
    fail("chicane interval must lie inside the track");
  }
  if (!(0.0 < stopping_distance && stopping_distance < ramp_distance)) {
    fail("need 0 < stopping_distance < ramp_distance");
  }
  if (!(ramp_distance < 0.5 * track_length)) fail("ramp_distance must be below half the track");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(max_speed > 0.0) || !(braking_rate > 0.0)) fail("speeds and rates must be positive");
  if (!(stop_margin >= 0.0)) fail("stop_margin must be non-negative");
  if (!(min_cruise_fraction > 0.0 && min_cruise_fraction <= 1.0)) {
    fail("min_cruise_fraction must be in (0, 1]");
  }
  const double needed = max_speed * max_speed / (2.0 * braking_rate) + max_speed * dt;
  if (needed > stopping_distance - chicane_half_width - stop_margin) {
    fail("a car at max_speed cannot stop between stopping_distance and the chicane");
  }
  supervisor.validate(chicane_nerve());
}

double chicane_indicator_f(double x, double p_low, double d, double d_ramp) {
  if (x <= d) return p_low;
  if (x >= d_ramp) return 1.0;
  return p_low + (1.0 - p_low) * (x - d) / (d_ramp - d);
}

Nerve chicane_nerve() { return Nerve::build({{kAlpha, kBeta}}); }

Trace run_chicane(const ChicaneConfig& config, std::uint64_t seed, std::size_t steps) {
  config.validate();
  const Track track(config);
  const double p_low = config.supervisor.thresholds.p_low();
  std::mt19937_64 rng(seed);

  std::array<Car, 2> cars;
  for (int i = 0; i < 2; ++i) {
    Car& car = cars[i];
    car.index = i;
    car.name = "car" + std::to_string(i + 1);
    car.q = "q" + std::to_string(i + 1);
    car.v = "v" + std::to_string(i + 1);
    car.other_q = "q" + std::to_string(2 - i);
    car.other_v = "v" + std::to_string(2 - i);
    // Start on the far side of the track, outside the ramp.
    const double span = config.track_length - 2.0 * config.ramp_distance;
    car.pos = wrap(config.chicane_center + config.ramp_distance + span * detail::uniform01(rng),
                   config.track_length);
    car.cruise = config.max_speed *
                 (config.min_cruise_fraction + (1.0 - config.min_cruise_fraction) * detail::uniform01(rng));
    car.speed = car.cruise;
    car.sup.current = kAlpha;
    car.picture.mark_undefined(car.q);
    car.picture.mark_undefined(car.v);
    car.orders = Orders{{"cruise_speed", car.cruise}};

    car.modes = std::make_unique<ModeRegistry>(chicane_nerve());
    auto evaluator = [q = car.q, p_low, &config, &track](const ModeId&, const ModeState& x,
                                                         const Orders&) {
      auto r = x.get(q);
      if (!r) return ScoreVector({{kAlpha, 0.0}, {kBeta, 0.0}});
      const double f = chicane_indicator_f(track.distance_to_centre(r->value), p_low,
                                           config.stopping_distance, config.ramp_distance);
      return ScoreVector({{kAlpha, f}, {kBeta, 1.0 - f}});
    };
    car.modes->register_mode(kAlpha, evaluator);
    car.modes->register_mode(kBeta, evaluator);
    car.transitions.add(kAlpha, kBeta, copy_transition({}, {car.other_q, car.other_v}));
    car.transitions.add(kBeta, kAlpha, copy_transition({car.q, car.v}));
  }

  for (int i = 0; i < 2; ++i) {
    Car& car = cars[i];
    const Car& other = cars[1 - i];
    OracleConfig oc;
    oc.deadline = 0.0;
    oc.seed = seed + static_cast<std::uint64_t>(i) + 1;
    oc.faults = detail::faults_for(config.faults, car.name);
    oc.standing_tasks = {
        QueryTask{Repeat{config.dt}, Priority::Standard, Measure{car.q, 1.0}, std::nullopt},
        QueryTask{Repeat{config.dt}, Priority::Standard, Measure{car.v, 1.0}, std::nullopt}};
    auto sensor = [&car, &other, &config](const std::string& var, double) -> std::optional<double> {
      if (var == car.q) return car.pos;
      if (var == car.v) return car.speed;
      if (config.policy == ChicanePolicy::Communal && other.sup.current != kBeta) return std::nullopt;
      if (var == car.other_q) return other.pos;
      if (var == car.other_v) return other.speed;
      return std::nullopt;
    };
    car.oracle = std::make_unique<OracleInterface>(std::move(oc), sensor);
  }

  Trace trace;
  trace.header = {"chicane", seed, steps, p_low, config.supervisor.thresholds.p_high()};
  trace.records.reserve(2 * steps);

  for (std::size_t k = 0; k < steps; ++k) {
    const double now = static_cast<double>(k) * config.dt;
    for (auto& car : cars) {
      car.record = TraceRecord{};
      car.record.step = k;
      car.record.time = now;
      car.record.system = car.name;
      auto responses = car.oracle->poll(now);
      detail::apply_responses(car.picture, responses, car.record.flags);
      note_other(car, responses);
    }
    for (auto& car : cars) {
      const ModeId before = car.sup.current;
      StepResult r = step(config.supervisor, car.sup, car.picture, car.orders,
                          ModeSystem{*car.modes, car.transitions}, now);
      record_step(car.record, before, r);
      if (const ModeState* s = detail::produced_state(r.decision)) car.picture = *s;
      if (const Orders* o = detail::produced_orders(r.decision)) car.orders = *o;
      car.sup = std::move(r.state);
      for (const auto& q : r.queries) car.oracle->enqueue(q, now);
      if (car.sup.current == kBeta) {
        car.oracle->enqueue(QueryTask::measure(car.other_q, 1.0), now);
        car.oracle->enqueue(QueryTask::measure(car.other_v, 1.0), now);
      }
    }
    for (auto& car : cars) {
      auto responses = car.oracle->poll(now);
      detail::apply_responses(car.picture, responses, car.record.flags);
      note_other(car, responses);
    }
    std::array<Plan, 2> plans{};
    for (int i = 0; i < 2; ++i) plans[i] = plan_for(config, track, cars[i], cars[1 - i]);
    for (int i = 0; i < 2; ++i) {
      Car& car = cars[i];
      const bool was_inside = track.inside(car.pos);
      integrate(config, track, car, plans[i]);
      if (car.sup.current == kBeta) car.record.events.emplace_back(plan_name(plans[i]));
      if (!was_inside && track.inside(car.pos)) car.record.events.emplace_back("enter_chicane");
      if (was_inside && !track.inside(car.pos)) car.record.events.emplace_back("leave_chicane");
    }
    for (auto& car : cars) {
      record_state(car.record, car.picture);
      car.record.truth = {{"inside", track.inside(car.pos) ? 1.0 : 0.0},
                          {"q", car.pos},
                          {"v", car.speed}};
      trace.records.push_back(std::move(car.record));
    }
  }
  return trace;
}

}  // namespace modal
