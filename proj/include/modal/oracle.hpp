#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "modal/modes.hpp"

namespace modal {

enum class Priority { Urgent = 0, Standard = 1, Background = 2 };

struct SingleAction {
  bool operator==(const SingleAction&) const = default;
};
struct Repeat {
  double period = 0.0;
  bool operator==(const Repeat&) const = default;
};
using Schedule = std::variant<SingleAction, Repeat>;

struct Measure {
  std::string variable;
  double required_accuracy = 1.0;
  bool operator==(const Measure&) const = default;
};
struct Actuate {
  std::string command;
  bool operator==(const Actuate&) const = default;
};
struct Question {
  std::string text;
  bool operator==(const Question&) const = default;
};
using Action = std::variant<Measure, Actuate, Question>;

/// Only issue a measurement if the last one of the variable is older than this.
struct Staleness {
  double older_than = 0.0;
  bool operator==(const Staleness&) const = default;
};

/// <schedule, priority, action, condition> tuple placed on a query list.
struct QueryTask {
  Schedule schedule = SingleAction{};
  Priority priority = Priority::Standard;
  Action action;
  std::optional<Staleness> condition;

  static QueryTask measure(std::string variable, double accuracy,
                           Priority priority = Priority::Standard);
  static QueryTask actuate(std::string command, Priority priority = Priority::Urgent);
  static QueryTask question(std::string text, Priority priority = Priority::Urgent);

  /// Variable, command or question text.
  const std::string& target() const;
  bool operator==(const QueryTask&) const = default;
};

using TaskRef = std::uint64_t;

enum class QualityFlag {
  Normal,
  LinkDown,
  Noise,
  Corrupted,
  AuthenticationError,
  ExternalInterference,
  CyberAttack,
};

std::string_view to_string(QualityFlag flag) noexcept;
std::string_view to_string(Priority priority) noexcept;
/// Throws Error(ParseError) for unknown names.
QualityFlag quality_flag_from_string(std::string_view name);

struct ValueOutcome {
  Interval interval;
  double timestamp = 0.0;
  bool operator==(const ValueOutcome&) const = default;
};
struct Acknowledged {
  bool operator==(const Acknowledged&) const = default;
};
struct TimedOut {
  bool operator==(const TimedOut&) const = default;
};
using ResponseOutcome = std::variant<ValueOutcome, Acknowledged, TimedOut>;

struct Response {
  TaskRef task = 0;
  std::string target;
  ResponseOutcome outcome;
  QualityFlag flag = QualityFlag::Normal;
  double delivered_at = 0.0;

  bool operator==(const Response&) const = default;
};

/// Interval [start, end) during which queries on `target` ("*" = all) carry `flag`.
struct FaultWindow {
  double start = 0.0;
  double end = 0.0;
  std::string target = "*";
  QualityFlag flag = QualityFlag::LinkDown;
};

struct Channel {
  double latency = 0.0;
  /// Half-width of the reported interval.
  double accuracy = 0.0;
};

struct OracleConfig {
  double default_latency = 0.0;
  double default_accuracy = 0.0;
  /// Responses not delivered within this delay after issue time out.
  double deadline = 1.0;
  std::map<std::string, Channel> channels;
  std::vector<FaultWindow> faults;
  /// Scale of the perturbation applied under the Noise flag.
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
  /// Default task list installed at creation.
  std::vector<QueryTask> standing_tasks;
};

/// Reads a physical variable; nullopt models a device that does not answer.
using Sensor = std::function<std::optional<double>(const std::string& variable, double now)>;
/// Executes a command; false models an unacknowledged command.
using Actuator = std::function<bool(const std::string& command, double now)>;

struct DispatchRecord {
  TaskRef task = 0;
  Priority priority = Priority::Standard;
  double time = 0.0;
  bool skipped = false;
};

/// Simulated physical-oracle boundary: a prioritized query list whose tasks
/// are issued on poll() and answered after the channel latency.
class OracleInterface {
 public:
  OracleInterface(OracleConfig config, Sensor sensor, Actuator actuator = {});

  /// Throws Error(InvalidTask) for a non-positive period or accuracy.
  TaskRef enqueue(const QueryTask& task, double now = 0.0);
  /// Issues every due task in (priority, enqueue order), then returns all
  /// responses whose delivery time has been reached, in delivery order.
  std::vector<Response> poll(double now);

  std::size_t pending() const noexcept { return pending_.size(); }
  std::size_t in_flight() const noexcept { return in_flight_.size(); }
  const std::vector<DispatchRecord>& dispatch_log() const noexcept { return dispatch_log_; }
  /// Active fault flag for `target` at `time`, Normal when none.
  QualityFlag fault_at(const std::string& target, double time) const;

 private:
  struct Pending {
    TaskRef ref;
    std::uint64_t seq;
    double due;
    QueryTask task;
    /// Repeat tasks fall due at anchor + n * period, computed without accumulation.
    double anchor = 0.0;
    std::uint64_t repeats = 0;
  };
  struct InFlight {
    /// Dispatch order; breaks ties between simultaneous deliveries.
    std::uint64_t seq;
    Response response;
  };

  void issue(const Pending& p, double now);
  double uniform_signed();

  OracleConfig config_;
  Sensor sensor_;
  Actuator actuator_;
  std::mt19937_64 rng_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_dispatch_ = 0;
  TaskRef next_ref_ = 1;
  std::vector<Pending> pending_;
  std::vector<InFlight> in_flight_;
  std::vector<DispatchRecord> dispatch_log_;
  std::map<std::string, double> last_measured_;
};

struct Assessment {
  bool consistent = false;
  bool accurate = false;
  bool operator==(const Assessment&) const = default;
};

/// consistent: the closed intervals intersect; accurate: the predicted
/// interval is no wider than the required accuracy.
/// Throws Error(MalformedInterval) for lo > hi and Error(InvalidTask) for a
/// non-positive accuracy.
Assessment assess(const Interval& predicted, const Interval& measured, double required_accuracy);

}  // namespace modal
