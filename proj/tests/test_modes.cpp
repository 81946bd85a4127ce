#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "modal/error.hpp"
#include "modal/modes.hpp"

using namespace modal;
using fixtures::code_of;

namespace {

ScoreVector scores_over(const Nerve& n, std::map<ModeId, double> given) {
  for (const auto& v : n.vertices()) given.emplace(v, 0.0);
  return ScoreVector(std::move(given));
}

}  // namespace

TEST_CASE("threshold bounds") {
  CHECK_NOTHROW(Thresholds(0.2, 0.9));
  CHECK(code_of([] { Thresholds(0.0, 0.5); }) == ErrorCode::InvalidThresholds);
  CHECK(code_of([] { Thresholds(0.5, 0.5); }) == ErrorCode::InvalidThresholds);
  CHECK(code_of([] { Thresholds(0.3, 1.0); }) == ErrorCode::InvalidThresholds);
  CHECK(code_of([] { Thresholds(std::nan(""), 0.5); }) == ErrorCode::InvalidThresholds);
}

TEST_CASE("mode state keeps readings, undefined markers and history") {
  ModeState x(2);
  x.set("q", 1.0, 0.1, 0.0);
  x.set("q", 2.0, 0.1, 1.0);
  x.set("q", 3.0, 0.1, 1.0);
  CHECK(x.value("q") == 3.0);
  CHECK(x.get("q")->interval() == Interval{2.9, 3.1});
  REQUIRE(x.history("q").size() == 2);
  CHECK(x.history("q").front().value == 1.0);

  x.mark_undefined("q");
  CHECK(x.has("q"));
  CHECK_FALSE(x.is_defined("q"));
  CHECK_FALSE(x.get("q").has_value());
  CHECK(x.undefined_variables() == std::set<std::string>{"q"});
  CHECK(x.history("q").back().value == 3.0);
  CHECK(code_of([&] { x.value("q"); }) == ErrorCode::ConfigInvalid);

  CHECK(code_of([&] { x.set("q", 0.0, 0.1, 0.5); }) == ErrorCode::TimestampRegression);
  CHECK(code_of([&] { x.set("v", 0.0, -1.0, 0.0); }) == ErrorCode::InvalidErrorBound);

  x.mark_undefined("v");
  CHECK(x.variables() == std::vector<std::string>{"q", "v"});
  x.erase("v");
  CHECK_FALSE(x.has("v"));
}

TEST_CASE("update_state leaves its input untouched") {
  ModeState a;
  const ModeState b = update_state(a, "q", 4.0, 0.0, 0.0);
  CHECK_FALSE(a.has("q"));
  CHECK(b.value("q") == 4.0);
  CHECK_FALSE(a == b);
}

TEST_CASE("orders merge and inclusion") {
  const Orders base{{"speed", 3.0}, {"mode", std::string("cruise")}};
  const Orders overlay{{"speed", 1.0}, {"degraded", true}};
  const Orders m = base.merged_with(overlay);
  CHECK(std::get<double>(*m.find("speed")) == 1.0);
  CHECK(m.includes(overlay));
  CHECK_FALSE(base.includes(overlay));
  CHECK(m.find("absent") == nullptr);
}

TEST_CASE("score vectors") {
  CHECK(code_of([] { ScoreVector({{"a", 1.5}}); }) == ErrorCode::ScoreOutOfRange);
  CHECK(code_of([] { ScoreVector({{"a", -0.1}}); }) == ErrorCode::ScoreOutOfRange);
  CHECK(code_of([] { ScoreVector({{"a", std::nan("")}}); }) == ErrorCode::ScoreOutOfRange);
  const ScoreVector s({{"b", 0.7}, {"a", 0.7}, {"c", 0.1}});
  CHECK(s.argmax()->first == ModeId("a"));
  CHECK(s.maximisers() == ModeSet{"a", "b"});
  CHECK(code_of([&] { s.at("zz"); }) == ErrorCode::MissingScore);
  CHECK(code_of([&] { s.require_total(fixtures::triangle_tail()); }) == ErrorCode::MissingScore);
}

TEST_CASE("classification of the worked examples") {
  const Thresholds t(0.2, 0.9);
  const Nerve cars = fixtures::car_portfolio();
  auto out = classify(scores_over(cars, {{"beta", 0.6}, {"delta", 0.6}}), t, cars);
  REQUIRE(kind_of(out) == OutcomeKind::Contradiction);
  CHECK(std::get<ContradictionOutcome>(out).support == ModeSet{"beta", "delta"});

  const Nerve tri = fixtures::triangle_tail();
  out = classify(scores_over(tri, {{"gamma", 0.6}, {"delta", 0.6}}), t, tri);
  REQUIRE(kind_of(out) == OutcomeKind::Point);
  const NervePoint p = std::get<PointOutcome>(out).point;
  CHECK(p.coordinate("gamma") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.coordinate("delta") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tri.contains(p));

  out = classify(scores_over(tri, {{"alpha", 0.8}, {"beta", 0.4}}), t, tri);
  REQUIRE(kind_of(out) == OutcomeKind::Point);
  CHECK(std::get<PointOutcome>(out).point.coordinate("alpha") == doctest::Approx(0.75));

  out = classify(scores_over(tri, {{"alpha", 0.2}, {"beta", 0.1}}), t, tri);
  REQUIRE(kind_of(out) == OutcomeKind::Partiality);
  CHECK(std::get<PartialityOutcome>(out).best->first == ModeId("alpha"));

  CHECK(code_of([&] { classify(ScoreVector({{"alpha", 0.5}}), t, tri); }) == ErrorCode::MissingScore);
}

TEST_CASE("classification agrees with subset enumeration") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto vertices = oracle::vertex_names(n);
    const auto family = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 4), 4);
    const Nerve nerve = fixtures::from_family(family, vertices);
    const double p_low = 0.05 + 0.5 * oracle::uniform(rng);
    const Thresholds t(p_low, p_low + 0.4 * (1.0 - p_low));
    std::map<std::string, double> raw;
    std::map<ModeId, double> scores;
    for (const auto& v : vertices) {
      const double s = oracle::uniform(rng);
      raw[v] = s;
      scores[ModeId(v)] = s;
    }
    const auto expected = oracle::classify(raw, p_low, family, vertices);
    const auto got = classify(ScoreVector(scores), t, nerve);
    REQUIRE(static_cast<int>(kind_of(got)) == static_cast<int>(expected.kind));
    if (const auto* p = std::get_if<PointOutcome>(&got)) {
      REQUIRE(p->point.coords().size() == expected.coords.size());
      for (const auto& [m, c] : expected.coords) REQUIRE(std::abs(p->point.coordinate(ModeId(m)) - c) <= 1e-12);
      REQUIRE(nerve.contains(p->point));
    } else if (const auto* c = std::get_if<ContradictionOutcome>(&got)) {
      ModeSet s(expected.support.begin(), expected.support.end());
      REQUIRE(c->support == s);
    }
  }
}

TEST_CASE("mode registry") {
  ModeRegistry reg(fixtures::triangle_tail());
  auto all = [](const ModeId&, const ModeState&, const Orders&) {
    return ScoreVector({{"alpha", 1.0}, {"beta", 0.0}, {"gamma", 0.0}, {"delta", 0.0}});
  };
  reg.register_mode("alpha", all);
  CHECK(code_of([&] { reg.register_mode("alpha", all); }) == ErrorCode::DuplicateMode);
  CHECK(code_of([&] { reg.register_mode("omega", all); }) == ErrorCode::ModeNotInNerve);
  CHECK(reg.evaluate("alpha", ModeState{}, Orders{}).at("alpha") == 1.0);
  CHECK(code_of([&] { reg.evaluate("beta", ModeState{}, Orders{}); }) == ErrorCode::UnknownMode);

  reg.register_mode("beta", [](const ModeId&, const ModeState&, const Orders&) {
    return ScoreVector({{"alpha", 1.0}});
  });
  CHECK(code_of([&] { reg.evaluate("beta", ModeState{}, Orders{}); }) == ErrorCode::MissingScore);
  CHECK(reg.modes() == ModeSet{"alpha", "beta"});
}
