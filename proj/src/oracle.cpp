#include "modal/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "modal/error.hpp"

namespace modal {

QueryTask QueryTask::measure(std::string variable, double accuracy, Priority priority) {
  return QueryTask{SingleAction{}, priority, Measure{std::move(variable), accuracy}, std::nullopt};
}

QueryTask QueryTask::actuate(std::string command, Priority priority) {
  return QueryTask{SingleAction{}, priority, Actuate{std::move(command)}, std::nullopt};
}

QueryTask QueryTask::question(std::string text, Priority priority) {
  return QueryTask{SingleAction{}, priority, Question{std::move(text)}, std::nullopt};
}

const std::string& QueryTask::target() const {
  return std::visit(
      [](const auto& a) -> const std::string& {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Measure>) return a.variable;
        else if constexpr (std::is_same_v<T, Actuate>) return a.command;
        else return a.text;
      },
      action);
}

std::string_view to_string(QualityFlag flag) noexcept {
  switch (flag) {
    case QualityFlag::Normal: return "normal";
    case QualityFlag::LinkDown: return "link_down";
    case QualityFlag::Noise: return "noise";
    case QualityFlag::Corrupted: return "corrupted";
    case QualityFlag::AuthenticationError: return "authentication_error";
    case QualityFlag::ExternalInterference: return "external_interference";
    case QualityFlag::CyberAttack: return "cyber_attack";
  }
  return "normal";
}

std::string_view to_string(Priority priority) noexcept {
  switch (priority) {
    case Priority::Urgent: return "urgent";
    case Priority::Standard: return "standard";
    case Priority::Background: return "background";
  }
  return "standard";
}

QualityFlag quality_flag_from_string(std::string_view name) {
  for (auto f : {QualityFlag::Normal, QualityFlag::LinkDown, QualityFlag::Noise,
                 QualityFlag::Corrupted, QualityFlag::AuthenticationError,
                 QualityFlag::ExternalInterference, QualityFlag::CyberAttack}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::ParseError, "unknown quality flag '" + std::string(name) + "'");
}

OracleInterface::OracleInterface(OracleConfig config, Sensor sensor, Actuator actuator)
    : config_(std::move(config)),
      sensor_(std::move(sensor)),
      actuator_(std::move(actuator)),
      rng_(config_.seed) {
  for (const auto& task : config_.standing_tasks) enqueue(task, 0.0);
}

TaskRef OracleInterface::enqueue(const QueryTask& task, double now) {
  if (const auto* r = std::get_if<Repeat>(&task.schedule); r && !(r->period > 0.0)) {
    throw Error(ErrorCode::InvalidTask, "repeat period must be positive");
  }
  if (const auto* m = std::get_if<Measure>(&task.action); m && !(m->required_accuracy > 0.0)) {
    throw Error(ErrorCode::InvalidTask, "required accuracy must be positive");
  }
  if (task.condition && !(task.condition->older_than >= 0.0)) {
    throw Error(ErrorCode::InvalidTask, "staleness duration must be non-negative");
  }
  const TaskRef ref = next_ref_++;
  pending_.push_back(Pending{ref, next_seq_++, now, task, now, 0});
  return ref;
}

QualityFlag OracleInterface::fault_at(const std::string& target, double time) const {
  for (const auto& f : config_.faults) {
    if (time >= f.start && time < f.end && (f.target == "*" || f.target == target)) return f.flag;
  }
  return QualityFlag::Normal;
}

double OracleInterface::uniform_signed() {
  // Raw engine bits only: std distributions are not reproducible across libraries.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

void OracleInterface::issue(const Pending& p, double now) {
  const QueryTask& task = p.task;
  const std::string& target = task.target();

  if (task.condition) {
    if (const auto* m = std::get_if<Measure>(&task.action)) {
      auto it = last_measured_.find(m->variable);
      if (it != last_measured_.end() && now - it->second < task.condition->older_than) {
        dispatch_log_.push_back({p.ref, task.priority, now, true});
        return;
      }
    }
  }
  dispatch_log_.push_back({p.ref, task.priority, now, false});

  auto channel_it = config_.channels.find(target);
  const Channel channel = channel_it != config_.channels.end()
                              ? channel_it->second
                              : Channel{config_.default_latency, config_.default_accuracy};
  const QualityFlag flag = fault_at(target, now);

  Response r;
  r.task = p.ref;
  r.target = target;
  r.flag = flag;

  auto time_out = [&] {
    r.outcome = TimedOut{};
    r.delivered_at = now + config_.deadline;
  };

  if (flag == QualityFlag::LinkDown || channel.latency > config_.deadline) {
    time_out();
  } else if (const auto* m = std::get_if<Measure>(&task.action)) {
    std::optional<double> v = sensor_ ? sensor_(m->variable, now) : std::nullopt;
    if (!v) {
      time_out();
    } else {
      double value = *v;
      double half = channel.accuracy;
      if (flag == QualityFlag::Noise) {
        const double e = config_.noise_scale * uniform_signed();
        value += e;
        half += std::abs(e);
      } else if (flag == QualityFlag::Corrupted) {
        value += 1e3 * config_.noise_scale * uniform_signed();
      }
      r.outcome = ValueOutcome{{value - half, value + half}, now};
      r.delivered_at = now + channel.latency;
    }
  } else if (const auto* a = std::get_if<Actuate>(&task.action)) {
    if (actuator_ && !actuator_(a->command, now)) {
      time_out();
    } else {
      r.outcome = Acknowledged{};
      r.delivered_at = now + channel.latency;
    }
  } else {
    r.outcome = Acknowledged{};
    r.delivered_at = now + channel.latency;
  }
  in_flight_.push_back(InFlight{next_dispatch_++, std::move(r)});
}

std::vector<Response> OracleInterface::poll(double now) {
  std::vector<Pending> due;
  std::vector<Pending> later;
  for (auto& p : pending_) (p.due <= now ? due : later).push_back(std::move(p));
  pending_ = std::move(later);

  std::sort(due.begin(), due.end(), [](const Pending& a, const Pending& b) {
    if (a.task.priority != b.task.priority) return a.task.priority < b.task.priority;
    return a.seq < b.seq;
  });
  for (auto& p : due) {
    issue(p, now);
    if (const auto* r = std::get_if<Repeat>(&p.task.schedule)) {
      // Keep the cadence anchored to the enqueue time.
      do {
        ++p.repeats;
        p.due = p.anchor + static_cast<double>(p.repeats) * r->period;
      } while (p.due <= now);
      pending_.push_back(std::move(p));
    }
  }

  std::vector<InFlight> ready;
  std::vector<InFlight> waiting;
  for (auto& f : in_flight_) (f.response.delivered_at <= now ? ready : waiting).push_back(std::move(f));
  in_flight_ = std::move(waiting);
  std::sort(ready.begin(), ready.end(), [](const InFlight& a, const InFlight& b) {
    if (a.response.delivered_at != b.response.delivered_at) {
      return a.response.delivered_at < b.response.delivered_at;
    }
    return a.seq < b.seq;
  });

  std::vector<Response> out;
  out.reserve(ready.size());
  for (auto& f : ready) {
    if (const auto* v = std::get_if<ValueOutcome>(&f.response.outcome)) {
      auto& last = last_measured_[f.response.target];
      last = std::max(last, v->timestamp);
    }
    out.push_back(std::move(f.response));
  }
  return out;
}

Assessment assess(const Interval& predicted, const Interval& measured, double required_accuracy) {
  if (!(predicted.lo <= predicted.hi) || !(measured.lo <= measured.hi)) {
    throw Error(ErrorCode::MalformedInterval, "interval with lo > hi");
  }
  if (!(required_accuracy > 0.0)) {
    throw Error(ErrorCode::InvalidTask, "required accuracy must be positive");
  }
  Assessment a;
  a.consistent = std::max(predicted.lo, measured.lo) <= std::min(predicted.hi, measured.hi);
  a.accurate = predicted.width() <= required_accuracy;
  return a;
}

}  // namespace modal
