#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "modal/error.hpp"
#include "modal/scenarios.hpp"
#include "modal/transitions.hpp"

using namespace modal;
using fixtures::code_of;

namespace {

const Thresholds kT(0.2, 0.9);

ScoreVector two(double a, double b) { return ScoreVector({{"alpha", a}, {"beta", b}}); }

}  // namespace

TEST_CASE("guard and undefined outputs") {
  TransitionRegistry reg;
  reg.add("alpha", "beta", copy_transition({}, {"q2", "v2"}));
  ModeState x;
  x.set("q1", 1.0, 0.0, 0.0);

  const auto r = reg.apply("alpha", "beta", x, Orders{}, two(0.5, 0.5), kT);
  CHECK(r.state.value("q1") == 1.0);
  CHECK(r.undefined_outputs == std::set<std::string>{"q2", "v2"});
  CHECK(r.state.undefined_variables() == r.undefined_outputs);

  CHECK(code_of([&] { reg.apply("alpha", "beta", x, Orders{}, two(0.5, 0.2), kT); }) ==
        ErrorCode::GuardViolation);
  CHECK_NOTHROW(reg.apply("alpha", "beta", x, Orders{}, two(0.5, 0.0), kT, true));
  CHECK(code_of([&] { reg.apply("beta", "alpha", x, Orders{}, two(0.5, 0.5), kT); }) ==
        ErrorCode::NoSuchTransition);
}

TEST_CASE("copy transition keeps only the listed variables") {
  ModeState x;
  x.set("q1", 1.0, 0.0, 0.0);
  x.set("q2", 2.0, 0.0, 0.0);
  const auto out = copy_transition({"q1"})(x, Orders{{"go", true}});
  CHECK(out.state.variables() == std::vector<std::string>{"q1"});
  CHECK(out.orders.has("go"));
}

TEST_CASE("table validation") {
  TransitionRegistry reg;
  reg.add("alpha", "delta", copy_transition());
  reg.add("beta", "delta", copy_transition(), true);
  reg.add("delta", "gamma", copy_transition());
  const auto warnings = reg.validate(fixtures::triangle_tail());
  int non_adjacent = 0, no_outgoing = 0;
  for (const auto& w : warnings) {
    if (w.kind == TableWarning::Kind::NonAdjacent) {
      ++non_adjacent;
      CHECK(w.from == ModeId("alpha"));
    } else {
      ++no_outgoing;
      CHECK(w.from == ModeId("gamma"));
    }
  }
  CHECK(non_adjacent == 1);
  CHECK(no_outgoing == 1);
  CHECK(reg.degraded_only("beta", "delta"));
  CHECK(reg.targets_from("alpha") == ModeSet{"delta"});
}

TEST_CASE("composition of manifold chart transitions") {
  const ChartAtlas atlas = build_atlas(4);
  const TransitionRegistry reg = atlas_transitions(atlas);
  const Evaluator eval = atlas_evaluator(atlas);
  const Thresholds t(0.2, 0.6);

  // Charts 0, 1 and 2 of a 4-chart atlas share an arc around chart 1's centre.
  std::mt19937_64 rng(3);
  std::vector<CompositionSample> samples;
  for (int i = 0; i < 100; ++i) {
    const double angle = atlas.centers[1] + (oracle::uniform(rng) - 0.5) * 0.3;
    ModeState x;
    x.set("s", atlas.to_chart(0, angle), 0.0, 0.0);
    samples.push_back({x, Orders{}});
  }
  const auto report = reg.check_composition("chart0", "chart1", "chart2", samples, eval, t, 1e-9);
  CHECK(report.checked > 0);
  CHECK(report.max_deviation < 1e-9);
  CHECK(report.definedness_mismatches == 0);
  CHECK(report.consistent());

  CHECK(code_of([&] { reg.check_composition("chart0", "chart1", "chart2", samples, eval, t, 0.0); }) ==
        ErrorCode::InvalidTolerance);
}

TEST_CASE("composition detects an inconsistent direct route") {
  TransitionRegistry reg;
  auto shift = [](double by) {
    return [by](const ModeState& x, const Orders& o) {
      ModeState y;
      y.set("s", x.value("s") + by, 0.0, 0.0);
      return TransitionOutput{y, o};
    };
  };
  reg.add("a", "b", shift(1.0));
  reg.add("b", "c", shift(1.0));
  reg.add("a", "c", shift(2.5));
  auto everywhere = [](const ModeId&, const ModeState&, const Orders&) {
    return ScoreVector({{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
  };
  ModeState x;
  x.set("s", 0.0, 0.0, 0.0);
  const auto report = reg.check_composition("a", "b", "c", {{x, Orders{}}}, everywhere, kT, 1e-9);
  CHECK(report.checked == 1);
  CHECK(report.max_deviation == doctest::Approx(0.5));
  CHECK_FALSE(report.consistent());
}
