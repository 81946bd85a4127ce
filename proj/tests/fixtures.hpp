#pragma once

#include <string>
#include <vector>

#include <doctest.h>

#include "modal/error.hpp"
#include "modal/nerve.hpp"
#include "oracles.hpp"

namespace fixtures {

/// Error code thrown by `f`; fails the test when nothing is thrown.
inline modal::ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const modal::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return modal::ErrorCode::Io;
}

/// The eight-mode car portfolio: a 2-simplex {alpha,beta,gamma} and a chain of
/// edges through delta, epsilon, zeta, theta and phi.
inline modal::Nerve car_portfolio() {
  return modal::Nerve::build({{"alpha", "beta", "gamma"},
                              {"alpha", "delta"},
                              {"gamma", "delta"},
                              {"delta", "epsilon"},
                              {"epsilon", "zeta"},
                              {"epsilon", "theta"},
                              {"zeta", "theta"},
                              {"theta", "phi"}});
}

/// One 2-simplex plus the edge gamma-delta.
inline modal::Nerve triangle_tail() {
  return modal::Nerve::build({{"alpha", "beta", "gamma"}, {"gamma", "delta"}});
}

inline modal::Nerve from_family(const oracle::Family& family, const std::set<std::string>& vertices) {
  std::vector<modal::ModeId> vs(vertices.begin(), vertices.end());
  std::vector<std::vector<modal::ModeId>> sets;
  for (const auto& d : family) sets.emplace_back(d.begin(), d.end());
  return modal::Nerve::build(vs, sets);
}

}  // namespace fixtures
