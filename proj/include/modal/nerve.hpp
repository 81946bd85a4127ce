#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace modal {

/// Name of a mode. Ordered lexicographically by name.
class ModeId {
 public:
  ModeId() = default;
  /// Throws Error(InvalidModeId) for an empty name.
  explicit ModeId(std::string name);
  ModeId(const char* name) : ModeId(std::string(name)) {}

  const std::string& name() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  auto operator<=>(const ModeId&) const = default;
  bool operator==(const ModeId&) const = default;

 private:
  std::string name_;
};

using ModeSet = std::set<ModeId>;

/// A simplex in canonical (sorted, duplicate-free) vertex order.
using Simplex = std::vector<ModeId>;

/// Barycentric point supported on a finite set of modes. Coordinates are
/// strictly positive; normalization is checked by Nerve::contains.
class NervePoint {
 public:
  NervePoint() = default;
  /// Throws Error(InvalidPoint) if any coordinate is not strictly positive or
  /// the map is empty.
  explicit NervePoint(std::map<ModeId, double> coords);

  const std::map<ModeId, double>& coords() const noexcept { return coords_; }
  ModeSet support() const;
  /// Coordinate of `mode`, or 0 when it is outside the support.
  double coordinate(const ModeId& mode) const;
  double sum() const;
  bool is_normalized(double tol = kNormalizationTolerance) const;

  bool operator==(const NervePoint&) const = default;

  static constexpr double kNormalizationTolerance = 1e-9;

 private:
  std::map<ModeId, double> coords_;
};

/// Entry of a refinement report: a fine mode whose declared coarse parent is
/// not a vertex of the coarse nerve (or, for active modes, is missing).
struct RefinementViolation {
  enum class Kind { UnknownParent, MissingParent };
  Kind kind;
  ModeId fine;
  std::optional<ModeId> parent;

  bool operator==(const RefinementViolation&) const = default;
};

struct RefinementReport {
  std::vector<RefinementViolation> violations;
  bool valid() const noexcept { return violations.empty(); }
};

/// Abstract simplicial complex over mode identifiers, stored as the full
/// downward-closed family of simplices. Immutable once built.
class Nerve {
 public:
  Nerve() = default;

  /// Downward closure of the declared vertex sets. Order-insensitive.
  /// Throws Error(DuplicateVertexName) when a declared set repeats a name.
  static Nerve build(const std::vector<std::vector<ModeId>>& declared);
  /// As build(), with additional isolated vertices.
  static Nerve build(const std::vector<ModeId>& vertices,
                     const std::vector<std::vector<ModeId>>& declared);

  const ModeSet& vertices() const noexcept { return vertices_; }
  const std::set<Simplex>& simplices() const noexcept { return simplices_; }
  bool has_vertex(const ModeId& mode) const { return vertices_.count(mode) != 0; }

  /// Number of stored simplices of the given dimension (vertex count - 1).
  std::size_t count(std::size_t dimension) const;
  /// Simplices not contained in any larger stored simplex.
  std::vector<Simplex> maximal_simplices() const;
  /// Vertices joined to `mode` by a 1-simplex.
  const ModeSet& neighbours(const ModeId& mode) const;

  /// True iff `modes` is non-empty and a stored simplex. Unknown modes give false.
  bool is_simplex(const ModeSet& modes) const;
  /// True iff the point's support is a simplex. Throws Error(NotNormalized).
  bool contains(const NervePoint& point) const;
  /// Shortest path length in the 1-skeleton; nullopt when unreachable.
  /// Throws Error(UnknownMode) when either endpoint is not a vertex.
  std::optional<std::size_t> edge_distance(const ModeId& from, const ModeId& to) const;

  bool operator==(const Nerve& other) const {
    return vertices_ == other.vertices_ && simplices_ == other.simplices_;
  }

 private:
  void insert_closure(const Simplex& simplex);

  ModeSet vertices_;
  std::set<Simplex> simplices_;
  std::map<ModeId, ModeSet> adjacency_;
};

/// Checks that every fine mode is contained in a vertex of the coarse nerve.
/// Active fine modes without any declared parent are reported too.
RefinementReport validate_refinement(const Nerve& coarse,
                                     const std::map<ModeId, ModeId>& containment,
                                     const ModeSet& fine_active);

std::string to_string(const ModeSet& modes);

}  // namespace modal

template <>
struct std::hash<modal::ModeId> {
  std::size_t operator()(const modal::ModeId& id) const noexcept {
    return std::hash<std::string>{}(id.name());
  }
};
