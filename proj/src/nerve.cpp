#include "modal/nerve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "modal/error.hpp"

namespace modal {

namespace {

// Closure enumerates every subset of a declared set.
constexpr std::size_t kMaxDeclaredSize = 20;

const ModeSet kNoNeighbours;

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateVertexName: return "DuplicateVertexName";
    case ErrorCode::InvalidModeId: return "InvalidModeId";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::DuplicateMode: return "DuplicateMode";
    case ErrorCode::ModeNotInNerve: return "ModeNotInNerve";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::InvalidErrorBound: return "InvalidErrorBound";
    case ErrorCode::TimestampRegression: return "TimestampRegression";
    case ErrorCode::NoSuchTransition: return "NoSuchTransition";
    case ErrorCode::GuardViolation: return "GuardViolation";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::MalformedInterval: return "MalformedInterval";
    case ErrorCode::InvalidTask: return "InvalidTask";
    case ErrorCode::InvalidChartCount: return "InvalidChartCount";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ModeId::ModeId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw Error(ErrorCode::InvalidModeId, "mode identifier must be non-empty");
}

NervePoint::NervePoint(std::map<ModeId, double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(ErrorCode::InvalidPoint, "nerve point needs a non-empty support");
  for (const auto& [mode, t] : coords_) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::InvalidPoint,
                  "coordinate of " + mode.name() + " must be strictly positive");
    }
  }
}

ModeSet NervePoint::support() const {
  ModeSet out;
  for (const auto& [mode, t] : coords_) out.insert(mode);
  return out;
}

double NervePoint::coordinate(const ModeId& mode) const {
  auto it = coords_.find(mode);
  return it == coords_.end() ? 0.0 : it->second;
}

double NervePoint::sum() const {
  double total = 0.0;
  for (const auto& [mode, t] : coords_) total += t;
  return total;
}

bool NervePoint::is_normalized(double tol) const { return std::abs(sum() - 1.0) <= tol; }

Nerve Nerve::build(const std::vector<std::vector<ModeId>>& declared) {
  return build({}, declared);
}

Nerve Nerve::build(const std::vector<ModeId>& vertices,
                   const std::vector<std::vector<ModeId>>& declared) {
  Nerve nerve;
  for (const auto& v : vertices) {
    if (v.empty()) throw Error(ErrorCode::InvalidModeId, "empty vertex name");
    nerve.insert_closure({v});
  }
  for (const auto& set : declared) {
    if (set.empty()) throw Error(ErrorCode::ConfigInvalid, "declared simplex must be non-empty");
    Simplex canonical = set;
    std::sort(canonical.begin(), canonical.end());
    if (std::adjacent_find(canonical.begin(), canonical.end()) != canonical.end()) {
      throw Error(ErrorCode::DuplicateVertexName,
                  "declared simplex repeats a vertex name");
    }
    for (const auto& v : canonical) {
      if (v.empty()) throw Error(ErrorCode::InvalidModeId, "empty vertex name");
    }
    if (canonical.size() > kMaxDeclaredSize) {
      throw Error(ErrorCode::ConfigInvalid, "declared simplex has more than 20 vertices");
    }
    nerve.insert_closure(canonical);
  }
  return nerve;
}

void Nerve::insert_closure(const Simplex& simplex) {
  const std::size_t n = simplex.size();
  if (simplices_.count(simplex)) return;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Simplex face;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) face.push_back(simplex[i]);
    }
    simplices_.insert(face);
    if (face.size() == 1) {
      vertices_.insert(face[0]);
      adjacency_.try_emplace(face[0]);
    } else if (face.size() == 2) {
      adjacency_[face[0]].insert(face[1]);
      adjacency_[face[1]].insert(face[0]);
    }
  }
}

std::size_t Nerve::count(std::size_t dimension) const {
  return static_cast<std::size_t>(std::count_if(
      simplices_.begin(), simplices_.end(),
      [dimension](const Simplex& s) { return s.size() == dimension + 1; }));
}

std::vector<Simplex> Nerve::maximal_simplices() const {
  std::vector<Simplex> out;
  for (const auto& s : simplices_) {
    bool maximal = true;
    for (const auto& v : vertices_) {
      if (std::binary_search(s.begin(), s.end(), v)) continue;
      Simplex grown = s;
      grown.insert(std::upper_bound(grown.begin(), grown.end(), v), v);
      if (simplices_.count(grown)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(s);
  }
  return out;
}

const ModeSet& Nerve::neighbours(const ModeId& mode) const {
  auto it = adjacency_.find(mode);
  return it == adjacency_.end() ? kNoNeighbours : it->second;
}

bool Nerve::is_simplex(const ModeSet& modes) const {
  if (modes.empty()) return false;
  return simplices_.count(Simplex(modes.begin(), modes.end())) != 0;
}

bool Nerve::contains(const NervePoint& point) const {
  if (!point.is_normalized()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "nerve point coordinates sum to " << point.sum();
    throw Error(ErrorCode::NotNormalized, msg.str());
  }
  return is_simplex(point.support());
}

std::optional<std::size_t> Nerve::edge_distance(const ModeId& from, const ModeId& to) const {
  for (const auto* m : {&from, &to}) {
    if (!has_vertex(*m)) throw Error(ErrorCode::UnknownMode, "unknown mode " + m->name());
  }
  if (from == to) return 0;
  std::map<ModeId, std::size_t> dist{{from, 0}};
  std::deque<ModeId> frontier{from};
  while (!frontier.empty()) {
    ModeId cur = frontier.front();
    frontier.pop_front();
    const std::size_t d = dist.at(cur);
    for (const auto& next : neighbours(cur)) {
      if (dist.count(next)) continue;
      if (next == to) return d + 1;
      dist.emplace(next, d + 1);
      frontier.push_back(next);
    }
  }
  return std::nullopt;
}

RefinementReport validate_refinement(const Nerve& coarse,
                                     const std::map<ModeId, ModeId>& containment,
                                     const ModeSet& fine_active) {
  RefinementReport report;
  for (const auto& [fine, parent] : containment) {
    if (!coarse.has_vertex(parent)) {
      report.violations.push_back({RefinementViolation::Kind::UnknownParent, fine, parent});
    }
  }
  for (const auto& fine : fine_active) {
    if (!containment.count(fine)) {
      report.violations.push_back({RefinementViolation::Kind::MissingParent, fine, std::nullopt});
    }
  }
  return report;
}

std::string to_string(const ModeSet& modes) {
  std::string out = "{";
  bool first = true;
  for (const auto& m : modes) {
    if (!first) out += ",";
    out += m.name();
    first = false;
  }
  return out + "}";
}

}  // namespace modal
