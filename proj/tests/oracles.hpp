#pragma once

// Independent reference implementations used to check the library.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Family = std::vector<std::set<std::string>>;

/// A non-empty set is a simplex iff it lies inside some declared set or is a
/// declared vertex.
inline bool is_simplex(const std::set<std::string>& s, const Family& declared,
                       const std::set<std::string>& vertices) {
  if (s.empty()) return false;
  if (s.size() == 1 && vertices.count(*s.begin())) return true;
  for (const auto& d : declared) {
    bool inside = true;
    for (const auto& v : s) inside = inside && d.count(v);
    if (inside) return true;
  }
  return false;
}

struct Classified {
  enum Kind { Point, Partiality, Contradiction } kind;
  std::set<std::string> support;
  std::map<std::string, double> coords;
};

/// Support {m : s(m) > p_low}; empty -> partiality; non-simplex -> contradiction;
/// otherwise coordinates (s - p_low) / sum(s - p_low).
inline Classified classify(const std::map<std::string, double>& scores, double p_low,
                           const Family& declared, const std::set<std::string>& vertices) {
  Classified out{Classified::Point, {}, {}};
  for (const auto& [m, s] : scores) {
    if (vertices.count(m) && s > p_low) out.support.insert(m);
  }
  if (out.support.empty()) {
    out.kind = Classified::Partiality;
    return out;
  }
  if (!is_simplex(out.support, declared, vertices)) {
    out.kind = Classified::Contradiction;
    return out;
  }
  double total = 0.0;
  for (const auto& m : out.support) total += scores.at(m) - p_low;
  for (const auto& m : out.support) out.coords[m] = (scores.at(m) - p_low) / total;
  return out;
}

constexpr long kInfinite = std::numeric_limits<long>::max() / 4;

/// All-pairs shortest edge counts over the 1-skeleton (Floyd-Warshall).
inline std::map<std::pair<std::string, std::string>, long> distances(
    const Family& declared, const std::set<std::string>& vertices) {
  std::vector<std::string> vs(vertices.begin(), vertices.end());
  const std::size_t n = vs.size();
  std::vector<std::vector<long>> d(n, std::vector<long>(n, kInfinite));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && is_simplex({vs[i], vs[j]}, declared, vertices)) d[i][j] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  std::map<std::pair<std::string, std::string>, long> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[{vs[i], vs[j]}] = d[i][j];
  }
  return out;
}

inline double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random declared family over vertices v0..v{n-1}: each declared set has
/// 1..max_size members.
inline Family random_family(std::mt19937_64& rng, int n, int sets, int max_size) {
  Family out;
  for (int s = 0; s < sets; ++s) {
    const int size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_size));
    std::set<std::string> d;
    while (static_cast<int>(d.size()) < std::min(size, n)) {
      d.insert("v" + std::to_string(rng() % static_cast<std::uint64_t>(n)));
    }
    out.push_back(d);
  }
  return out;
}

inline std::set<std::string> vertex_names(int n) {
  std::set<std::string> out;
  for (int i = 0; i < n; ++i) out.insert("v" + std::to_string(i));
  return out;
}

}  // namespace oracle
