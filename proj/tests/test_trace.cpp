#include <doctest.h>

#include <string>

#include "fixtures.hpp"
#include "modal/error.hpp"
#include "modal/scenario_file.hpp"
#include "modal/trace.hpp"

using namespace modal;
using fixtures::code_of;

namespace {

std::string scenario_path(const std::string& name) { return std::string(MODAL_SCENARIO_DIR) + "/" + name; }

bool mentions(const std::vector<std::string>& items, const std::string& needle) {
  for (const auto& s : items) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("structured traces round-trip") {
  for (const char* name : {"chicane.json", "solar.json", "manifold.json", "alarm.json"}) {
    const Scenario s = load_scenario(read_file(scenario_path(name)));
    const Trace t = run_scenario(s, std::nullopt, 60);
    const std::string text = to_structured(t);
    const Trace back = parse_structured(text);
    CHECK(back == t);
    CHECK(to_structured(back) == text);
  }
}

TEST_CASE("structured trace errors") {
  CHECK(code_of([] { parse_structured(""); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_structured("{not json}\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_structured(R"({"schema":"modal-trace","version":99})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_structured(R"({"schema":"other","version":1})"); }) == ErrorCode::ParseError);
}

TEST_CASE("text table has a header and one row per record") {
  const Scenario s = load_scenario(read_file(scenario_path("alarm.json")));
  const Trace t = run_scenario(s);
  const std::string table = to_text_table(t);
  std::size_t lines = 0;
  for (char c : table) lines += c == '\n';
  CHECK(lines >= t.records.size() + 1);
  CHECK(table.find("alarm") != std::string::npos);
}

TEST_CASE("summary counts and safety verdicts") {
  Trace t;
  t.header = {"custom", 0, 2, 0.2, 0.9};
  TraceRecord ok;
  ok.system = "s";
  ok.mode = "a";
  ok.next_mode = "b";
  ok.scores = {{"a", 0.5}, {"b", 0.7}};
  ok.outcome = "point";
  ok.decision = "transition";
  ok.target = "b";
  TraceRecord bad = ok;
  bad.step = 1;
  bad.scores = {{"a", 0.95}, {"b", 0.1}};
  t.records = {ok, bad};

  const TraceSummary s = summarize(t);
  CHECK(s.transitions == 2);
  CHECK(s.hysteresis_violations == 1);
  CHECK(s.guard_violations == 1);
  CHECK_FALSE(s.verdicts.at("hysteresis"));
  CHECK_FALSE(s.verdicts.at("guarded_transitions"));
  CHECK(s.occupancy.at("s").at("a") == 2);
  CHECK(format_summary(s).find("VIOLATED") != std::string::npos);
}

TEST_CASE("query descriptions") {
  CHECK(describe(QueryTask::measure("q2", 1.0, Priority::Urgent)) == "urgent:measure:q2");
  CHECK(describe(QueryTask::actuate("brake")) == "urgent:actuate:brake");
}

TEST_CASE("bundled scenario files validate") {
  for (const char* name : {"chicane.json", "chicane_communal_faults.json", "solar.json", "manifold.json",
                           "alarm.json", "car_portfolio_nerve.json", "triangle_tail_nerve.json"}) {
    const ValidationReport r = validate_scenario(read_file(scenario_path(name)));
    CHECK_MESSAGE(r.ok(), name);
    CHECK_MESSAGE(r.warnings.empty(), name);
  }
  const ValidationReport r = validate_scenario(read_file(scenario_path("nonadjacent_transition.json")));
  CHECK(r.ok());
  REQUIRE(r.warnings.size() == 1);
  CHECK(mentions(r.warnings, "beta"));
}

TEST_CASE("scenario file problems are itemized") {
  auto report = [](const std::string& text) { return validate_scenario(text); };

  CHECK(code_of([&] { report("{"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { report(R"({"scenario": 3})"); }) == ErrorCode::ParseError);

  auto r = report(R"({"scenario": "chicane", "bogus": 1, "thresholds": {"p_low": 0.9, "p_high": 0.2}})");
  CHECK(mentions(r.errors, "bogus"));
  CHECK(mentions(r.errors, "thresholds"));

  r = report(R"({"scenario": "warp"})");
  CHECK(mentions(r.errors, "unknown kind"));

  r = report(R"({"scenario": "chicane", "params": {"policy": "anarchy", "max_speedd": 3}})");
  CHECK(mentions(r.errors, "anarchy"));
  CHECK(mentions(r.errors, "max_speedd"));

  r = report(R"({"scenario": "chicane", "nerve": {"vertices": ["alpha", "gamma"], "simplices": [["alpha", "gamma"]]}})");
  CHECK(mentions(r.errors, "portfolio"));

  r = report(R"({"scenario": "custom", "nerve": {"vertices": ["a", "a"]}})");
  CHECK_FALSE(r.ok());

  r = report(R"({"scenario": "custom", "nerve": {"simplices": [["a", "b"]]},
                 "supervisor": {"strategy": "failsafe", "safe_mode": "z"}})");
  CHECK(mentions(r.errors, "'z'"));

  r = report(R"({"scenario": "custom", "nerve": {"simplices": [["a", "b"]]},
                 "refinement": {"containment": {"a1": "q"}, "active": ["a1"]}})");
  CHECK(mentions(r.errors, "refinement"));

  r = report(R"({"scenario": "manifold", "params": {"charts": 1}})");
  CHECK_FALSE(r.ok());

  CHECK(code_of([] { load_scenario(R"({"scenario": "warp"})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { read_file("/nonexistent/file.json"); }) == ErrorCode::Io);
}

TEST_CASE("seed and step overrides") {
  const Scenario s = load_scenario(read_file(scenario_path("chicane.json")));
  const Trace a = run_scenario(s, 7, 30);
  CHECK(a.header.seed == 7);
  CHECK(a.records.size() == 60);
  CHECK(to_structured(a) == to_structured(run_scenario(s, 7, 30)));
  CHECK(to_structured(a) != to_structured(run_scenario(s, 8, 30)));
}

TEST_CASE("nerve and score parsing") {
  const Nerve n = parse_nerve(read_file(scenario_path("car_portfolio_nerve.json")));
  CHECK(n == fixtures::car_portfolio());
  CHECK(code_of([] { parse_nerve("[1,2]"); }) == ErrorCode::ParseError);
  CHECK(parse_scores(R"({"a": 0.5})").at("a") == 0.5);
  CHECK(code_of([] { parse_scores(R"({"a": 2})"); }) == ErrorCode::ScoreOutOfRange);
  CHECK(code_of([] { parse_scores(R"({"a": "x"})"); }) == ErrorCode::ParseError);
}
