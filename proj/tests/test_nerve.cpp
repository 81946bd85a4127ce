#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "modal/error.hpp"
#include "modal/nerve.hpp"

using namespace modal;

using fixtures::code_of;

TEST_CASE("mode identifiers") {
  CHECK(ModeId("a") < ModeId("b"));
  CHECK(ModeId("alpha") == ModeId(std::string("alpha")));
  CHECK(code_of([] { ModeId(""); }) == ErrorCode::InvalidModeId);
}

TEST_CASE("downward closure of the car portfolio") {
  const Nerve n = fixtures::car_portfolio();
  CHECK(n.vertices().size() == 8);
  CHECK(n.count(0) == 8);
  CHECK(n.count(1) == 10);
  CHECK(n.count(2) == 1);
  CHECK(n.count(3) == 0);
  CHECK(n.is_simplex({"alpha", "beta", "gamma"}));
  CHECK(n.is_simplex({"gamma", "delta"}));
  CHECK_FALSE(n.is_simplex({"beta", "delta"}));
  CHECK_FALSE(n.is_simplex({"zeta", "theta", "epsilon"}));
  CHECK_FALSE(n.is_simplex({}));
  CHECK_FALSE(n.is_simplex({"omega"}));
}

TEST_CASE("one 2-simplex, four 1-simplices") {
  const Nerve n = fixtures::triangle_tail();
  CHECK(n.count(2) == 1);
  CHECK(n.count(1) == 4);
  CHECK(n.count(0) == 4);
  CHECK(n.maximal_simplices() == std::vector<Simplex>{{"alpha", "beta", "gamma"}, {"delta", "gamma"}});
}

TEST_CASE("build is insensitive to declaration order") {
  const Nerve a = Nerve::build({{"c", "a", "b"}, {"d", "c"}});
  const Nerve b = Nerve::build({{"c", "d"}, {"b", "c", "a"}});
  CHECK(a == b);
}

TEST_CASE("construction errors") {
  CHECK(code_of([] { Nerve::build({{"a", "b", "a"}}); }) == ErrorCode::DuplicateVertexName);
  CHECK(code_of([] { Nerve::build({{}}); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("isolated vertices") {
  const Nerve n = Nerve::build({"lonely"}, {{"a", "b"}});
  CHECK(n.has_vertex("lonely"));
  CHECK(n.neighbours("lonely").empty());
  CHECK_FALSE(n.edge_distance("lonely", "a").has_value());
}

TEST_CASE("contains checks normalization and support") {
  const Nerve n = fixtures::triangle_tail();
  CHECK(n.contains(NervePoint({{"gamma", 0.5}, {"delta", 0.5}})));
  CHECK_FALSE(n.contains(NervePoint({{"beta", 0.5}, {"delta", 0.5}})));
  CHECK(n.contains(NervePoint({{"alpha", 1.0 - 1e-10}})));
  CHECK(code_of([&] { n.contains(NervePoint({{"alpha", 0.4}, {"beta", 0.4}})); }) == ErrorCode::NotNormalized);
  CHECK(code_of([] { NervePoint({{"alpha", 0.0}}); }) == ErrorCode::InvalidPoint);
  CHECK(code_of([] { NervePoint(std::map<ModeId, double>{}); }) == ErrorCode::InvalidPoint);
}

TEST_CASE("edge distance on the chain example") {
  const Nerve chain = Nerve::build({{"alpha", "gamma"}, {"gamma", "beta"}});
  CHECK(chain.edge_distance("alpha", "beta") == 2);
  CHECK(chain.edge_distance("alpha", "alpha") == 0);
  CHECK(code_of([&] { chain.edge_distance("alpha", "nope"); }) == ErrorCode::UnknownMode);

  const Nerve n = fixtures::car_portfolio();
  CHECK(n.edge_distance("beta", "delta") == 2);
  CHECK(n.edge_distance("alpha", "phi") == 4);
}

TEST_CASE("simplex membership agrees with subset enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto vertices = oracle::vertex_names(n);
    const auto family = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 5), 4);
    const Nerve nerve = fixtures::from_family(family, vertices);
    std::vector<std::string> vs(vertices.begin(), vertices.end());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::set<std::string> s;
      ModeSet m;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          s.insert(vs[i]);
          m.insert(ModeId(vs[i]));
        }
      }
      REQUIRE(nerve.is_simplex(m) == oracle::is_simplex(s, family, vertices));
    }
  }
}

TEST_CASE("edge distance agrees with Floyd-Warshall") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto vertices = oracle::vertex_names(n);
    const auto family = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 6), 3);
    const Nerve nerve = fixtures::from_family(family, vertices);
    const auto reference = oracle::distances(family, vertices);
    for (const auto& [pair, d] : reference) {
      auto got = nerve.edge_distance(ModeId(pair.first), ModeId(pair.second));
      if (d >= oracle::kInfinite) {
        REQUIRE_FALSE(got.has_value());
      } else {
        REQUIRE(got.has_value());
        REQUIRE(static_cast<long>(*got) == d);
      }
    }
  }
}

TEST_CASE("refinement containment") {
  const Nerve coarse = Nerve::build({{"alpha", "beta"}});
  std::map<ModeId, ModeId> containment{{"alpha_dry", "alpha"}, {"alpha_wet", "alpha"}, {"x", "gamma"}};
  const RefinementReport r = validate_refinement(coarse, containment, {"alpha_dry", "orphan"});
  REQUIRE(r.violations.size() == 2);
  CHECK(r.violations[0] == RefinementViolation{RefinementViolation::Kind::UnknownParent, "x", ModeId("gamma")});
  CHECK(r.violations[1] == RefinementViolation{RefinementViolation::Kind::MissingParent, "orphan", std::nullopt});
  CHECK(validate_refinement(coarse, {{"alpha_dry", "alpha"}}, {"alpha_dry"}).valid());
}

TEST_CASE("mode set formatting") { CHECK(to_string(ModeSet{"delta", "beta"}) == "{beta,delta}"); }
