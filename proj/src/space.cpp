#include "roe/space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace roe {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + ")";
}

}  // namespace

MetricViolation::MetricViolation(std::string kind, std::vector<std::string> witness,
                                 const std::string& detail)
    : Error(ErrorCode::MetricViolation, kind + " " + join(witness) + ": " + detail),
      kind_(std::move(kind)),
      witness_(std::move(witness)) {}

SpacePtr FiniteMetricSpace::build(std::vector<std::string> points, std::vector<double> dist,
                                  std::string label) {
  const std::size_t n = points.size();
  if (dist.size() != n * n) {
    throw MetricViolation("shape", {}, "distance table has " + std::to_string(dist.size()) +
                                           " entries, expected " + std::to_string(n * n));
  }
  auto space = std::shared_ptr<FiniteMetricSpace>(new FiniteMetricSpace());
  space->label_ = std::move(label);
  space->ids_ = std::move(points);
  space->dist_ = std::move(dist);
  for (Index i = 0; i < n; ++i) {
    if (!space->lookup_.emplace(space->ids_[i], i).second) {
      throw MetricViolation("duplicate", {space->ids_[i]}, "point ids must be unique");
    }
  }
  const auto& ids = space->ids_;
  auto d = [&](Index i, Index j) { return space->dist_[i * n + j]; };
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double v = d(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw MetricViolation("nonnegativity", {ids[i], ids[j]}, "distance must be finite and >= 0");
      }
      if (i == j && v != 0.0) {
        throw MetricViolation("diagonal", {ids[i]}, "d(x,x) must be 0");
      }
      if (i != j && v <= 0.0) {
        throw MetricViolation("positivity", {ids[i], ids[j]}, "distinct points at distance 0");
      }
      if (j > i && std::abs(v - d(j, i)) > kDistanceTol) {
        throw MetricViolation("symmetry", {ids[i], ids[j]}, "d(x,y) != d(y,x)");
      }
    }
  }
  // O(n^3) triangle scan; the witness reads (x, via, y).
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      const double direct = d(x, y);
      for (Index z = 0; z < n; ++z) {
        if (direct > d(x, z) + d(z, y) + kDistanceTol) {
          std::ostringstream msg;
          msg << "d(x,y)=" << direct << " > " << d(x, z) << " + " << d(z, y);
          throw MetricViolation("triangle", {ids[x], ids[z], ids[y]}, msg.str());
        }
      }
    }
  }
  space->finalize();
  return space;
}

SpacePtr FiniteMetricSpace::from_graph(std::vector<std::string> points,
                                       const std::vector<std::pair<Index, Index>>& edges,
                                       std::string label) {
  const std::size_t n = points.size();
  auto space = std::shared_ptr<FiniteMetricSpace>(new FiniteMetricSpace());
  space->label_ = std::move(label);
  space->ids_ = std::move(points);
  for (Index i = 0; i < n; ++i) {
    if (!space->lookup_.emplace(space->ids_[i], i).second) {
      throw MetricViolation("duplicate", {space->ids_[i]}, "point ids must be unique");
    }
  }
  std::vector<std::vector<Index>> adj(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw Error(ErrorCode::UnknownPoint, "edge endpoint out of range");
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  constexpr double kUnreached = -1.0;
  space->dist_.assign(n * n, kUnreached);
  std::deque<Index> queue;
  for (Index s = 0; s < n; ++s) {
    double* row = space->dist_.data() + s * n;
    row[s] = 0.0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const Index v = queue.front();
      queue.pop_front();
      for (Index w : adj[v]) {
        if (row[w] == kUnreached) {
          row[w] = row[v] + 1.0;
          queue.push_back(w);
        }
      }
    }
    for (Index t = 0; t < n; ++t) {
      if (row[t] == kUnreached) {
        throw Error(ErrorCode::DisconnectedGraph,
                    "no path from " + space->ids_[s] + " to " + space->ids_[t]);
      }
    }
  }
  space->finalize();
  return space;
}

void FiniteMetricSpace::finalize() {
  integral_ = std::all_of(dist_.begin(), dist_.end(),
                          [](double v) { return v == std::floor(v); });
  diameter_ = 0.0;
  min_positive_ = std::numeric_limits<double>::infinity();
  for (double v : dist_) {
    diameter_ = std::max(diameter_, v);
    if (v > 0.0) min_positive_ = std::min(min_positive_, v);
  }
  if (!std::isfinite(min_positive_)) min_positive_ = 0.0;
}

Index FiniteMetricSpace::index_of(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) throw Error(ErrorCode::UnknownPoint, "no point with id '" + id + "'");
  return it->second;
}

void FiniteMetricSpace::check_index(Index x) const {
  if (x >= ids_.size()) {
    throw Error(ErrorCode::UnknownPoint,
                "index " + std::to_string(x) + " outside space of size " + std::to_string(size()));
  }
}

double FiniteMetricSpace::distance_to_set(Index x, const PointSet& set) const {
  double best = std::numeric_limits<double>::infinity();
  for (Index a : set) best = std::min(best, dist(x, a));
  return best;
}

double FiniteMetricSpace::set_distance(const PointSet& a, const PointSet& b) const {
  double best = std::numeric_limits<double>::infinity();
  for (Index x : a) best = std::min(best, distance_to_set(x, b));
  return best;
}

PointSet FiniteMetricSpace::to_indices(const std::vector<std::string>& ids) const {
  PointSet out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(index_of(id));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> FiniteMetricSpace::to_ids(const PointSet& set) const {
  std::vector<std::string> out;
  out.reserve(set.size());
  for (Index i : set) out.push_back(id(i));
  return out;
}

PointSet make_set(const FiniteMetricSpace& space, std::vector<Index> points) {
  for (Index p : points) space.check_index(p);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

PointSet all_points(const FiniteMetricSpace& space) {
  PointSet out(space.size());
  for (Index i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

PointSet set_union(const PointSet& a, const PointSet& b) {
  PointSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet complement(const FiniteMetricSpace& space, const PointSet& set) {
  PointSet out;
  auto it = set.begin();
  for (Index i = 0; i < space.size(); ++i) {
    if (it != set.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

PointSet ball(const FiniteMetricSpace& space, const PointSet& centers, double r) {
  for (Index c : centers) space.check_index(c);
  PointSet out;
  for (Index y = 0; y < space.size(); ++y) {
    for (Index c : centers) {
      if (space.within(space.dist(y, c), r)) {
        out.push_back(y);
        break;
      }
    }
  }
  return out;
}

std::size_t growth(const FiniteMetricSpace& space, double r) {
  std::size_t best = 0;
  for (Index x = 0; x < space.size(); ++x) {
    auto row = space.row(x);
    const auto count = static_cast<std::size_t>(
        std::count_if(row.begin(), row.end(), [&](double d) { return space.within(d, r); }));
    best = std::max(best, count);
  }
  return best;
}

CoarseMap::CoarseMap(SpacePtr domain, SpacePtr codomain, std::vector<Index> table)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), table_(std::move(table)) {
  if (!domain_ || !codomain_) throw Error(ErrorCode::InvalidParams, "map needs both spaces");
  if (table_.size() != domain_->size()) {
    throw Error(ErrorCode::DomainMismatch, "map table has " + std::to_string(table_.size()) +
                                               " entries for a domain of " +
                                               std::to_string(domain_->size()) + " points");
  }
  for (Index y : table_) codomain_->check_index(y);
}

CoarseMap CoarseMap::identity(SpacePtr space) {
  std::vector<Index> table(space->size());
  for (Index i = 0; i < table.size(); ++i) table[i] = i;
  return CoarseMap(space, space, std::move(table));
}

bool CoarseMap::injective() const {
  std::vector<char> hit(codomain_->size(), 0);
  for (Index y : table_) {
    if (hit[y]) return false;
    hit[y] = 1;
  }
  return true;
}

bool CoarseMap::bijective() const { return injective() && table_.size() == codomain_->size(); }

void CoarseMap::require_bijective() const {
  std::vector<Index> preimage(codomain_->size(), codomain_->size());
  for (Index x = 0; x < table_.size(); ++x) {
    const Index y = table_[x];
    if (preimage[y] != codomain_->size()) {
      throw Error(ErrorCode::NotBijective, "collision: " + domain_->id(preimage[y]) + " and " +
                                               domain_->id(x) + " both map to " +
                                               codomain_->id(y));
    }
    preimage[y] = x;
  }
  for (Index y = 0; y < preimage.size(); ++y) {
    if (preimage[y] == codomain_->size()) {
      throw Error(ErrorCode::NotBijective, "point " + codomain_->id(y) + " is not in the image");
    }
  }
}

CoarseMap CoarseMap::inverse() const {
  require_bijective();
  std::vector<Index> inv(table_.size());
  for (Index x = 0; x < table_.size(); ++x) inv[table_[x]] = x;
  return CoarseMap(codomain_, domain_, std::move(inv));
}

PointSet CoarseMap::image(const PointSet& set) const {
  std::vector<Index> out;
  out.reserve(set.size());
  for (Index x : set) out.push_back(table_.at(x));
  return make_set(*codomain_, std::move(out));
}

CoarseMap compose(const CoarseMap& g, const CoarseMap& f) {
  if (f.codomain() != g.domain()) {
    throw Error(ErrorCode::DomainMismatch, "cannot compose: codomain of f is not domain of g");
  }
  std::vector<Index> table(f.table().size());
  for (Index x = 0; x < table.size(); ++x) table[x] = g(f(x));
  return CoarseMap(f.domain(), g.codomain(), std::move(table));
}

double ExpansionProfile::at(double r) const {
  for (const auto& [radius, s] : samples) {
    if (radius == r) return s;
  }
  throw Error(ErrorCode::InvalidParams, "radius not sampled in profile");
}

bool ExpansionProfile::monotone() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].first < samples[i - 1].first) return false;
    if (samples[i].second < samples[i - 1].second) return false;
  }
  return true;
}

ExpansionProfile expansion_profile(const CoarseMap& map, std::span<const double> radii) {
  const auto& X = *map.domain();
  const auto& Y = *map.codomain();
  if (!std::is_sorted(radii.begin(), radii.end())) {
    throw Error(ErrorCode::InvalidParams, "radii must be ascending");
  }
  ExpansionProfile profile;
  profile.samples.reserve(radii.size());
  for (double r : radii) profile.samples.emplace_back(r, 0.0);
  for (Index x = 0; x < X.size(); ++x) {
    for (Index x2 = x + 1; x2 < X.size(); ++x2) {
      const double dx = X.dist(x, x2);
      const double dy = Y.dist(map(x), map(x2));
      for (auto& [r, s] : profile.samples) {
        if (X.within(dx, r)) s = std::max(s, dy);
      }
    }
  }
  return profile;
}

double closeness(const CoarseMap& f, const CoarseMap& g) {
  if (f.domain() != g.domain() || f.codomain() != g.codomain()) {
    throw Error(ErrorCode::DomainMismatch, "closeness needs maps with equal domain and codomain");
  }
  const auto& Y = *f.codomain();
  double best = 0.0;
  for (Index x = 0; x < f.table().size(); ++x) best = std::max(best, Y.dist(f(x), g(x)));
  return best;
}

MutualInverseReport verify_mutual_inverse(const CoarseMap& f, const CoarseMap& g,
                                          std::span<const double> radii) {
  if (f.domain() != g.codomain() || f.codomain() != g.domain()) {
    throw Error(ErrorCode::DomainMismatch, "f: X->Y and g: Y->X required");
  }
  MutualInverseReport report;
  report.closeness_fg_id = closeness(compose(f, g), CoarseMap::identity(f.codomain()));
  report.closeness_gf_id = closeness(compose(g, f), CoarseMap::identity(f.domain()));
  report.expansion_f = expansion_profile(f, radii);
  report.expansion_g = expansion_profile(g, radii);
  return report;
}

}  // namespace roe
