#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "roe/error.hpp"

namespace roe {

using Index = std::size_t;

/// Sorted, duplicate-free list of dense point indices.
using PointSet = std::vector<Index>;

/// Absolute tolerance for distance comparisons on non-integral metrics.
inline constexpr double kDistanceTol = 1e-12;

class MetricViolation : public Error {
 public:
  MetricViolation(std::string kind, std::vector<std::string> witness, const std::string& detail);

  const std::string& kind() const noexcept { return kind_; }
  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  std::string kind_;
  std::vector<std::string> witness_;
};

class FiniteMetricSpace;
using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// A finite metric space with a full distance table. Points carry opaque
/// string ids; everything internal uses positional indices.
class FiniteMetricSpace {
 public:
  /// Validates the table (shape, zero diagonal, positivity, symmetry,
  /// triangle inequality) and throws MetricViolation on the first failure.
  static SpacePtr build(std::vector<std::string> points, std::vector<double> dist,
                        std::string label = {});

  /// Hop-count metric of an undirected connected graph, by BFS from every
  /// vertex. Edges are index pairs.
  static SpacePtr from_graph(std::vector<std::string> points,
                             const std::vector<std::pair<Index, Index>>& edges,
                             std::string label = {});

  std::size_t size() const noexcept { return ids_.size(); }
  const std::string& label() const noexcept { return label_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(Index i) const { return ids_.at(i); }
  Index index_of(const std::string& id) const;

  double dist(Index x, Index y) const noexcept { return dist_[x * ids_.size() + y]; }
  std::span<const double> row(Index x) const noexcept {
    return {dist_.data() + x * ids_.size(), ids_.size()};
  }
  const std::vector<double>& table() const noexcept { return dist_; }

  /// True when every distance is an exact integer (graph metrics); such
  /// spaces compare distances exactly.
  bool integral() const noexcept { return integral_; }

  /// d <= r, exact for integral metrics and up to kDistanceTol otherwise.
  bool within(double d, double r) const noexcept {
    return integral_ ? d <= r : d <= r + kDistanceTol;
  }

  double diameter() const noexcept { return diameter_; }
  /// Smallest nonzero distance; 0 for a one-point space.
  double min_positive_distance() const noexcept { return min_positive_; }

  /// d(x, A); +infinity for empty A.
  double distance_to_set(Index x, const PointSet& set) const;
  /// d(A, B); +infinity if either is empty.
  double set_distance(const PointSet& a, const PointSet& b) const;

  void check_index(Index x) const;
  PointSet to_indices(const std::vector<std::string>& ids) const;
  std::vector<std::string> to_ids(const PointSet& set) const;

 private:
  FiniteMetricSpace() = default;

  std::string label_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
  std::vector<double> dist_;
  bool integral_ = false;
  double diameter_ = 0.0;
  double min_positive_ = 0.0;

  void finalize();
};

/// Sorts and deduplicates, then checks every index against the space.
PointSet make_set(const FiniteMetricSpace& space, std::vector<Index> points);
PointSet all_points(const FiniteMetricSpace& space);
PointSet set_union(const PointSet& a, const PointSet& b);
PointSet complement(const FiniteMetricSpace& space, const PointSet& set);

/// B_r(A): all points within r of the center set. r = 0 returns A itself.
PointSet ball(const FiniteMetricSpace& space, const PointSet& centers, double r);
/// max over x of |B_r(x)|.
std::size_t growth(const FiniteMetricSpace& space, double r);

/// Total function between two finite spaces, stored as a table of indices.
class CoarseMap {
 public:
  CoarseMap(SpacePtr domain, SpacePtr codomain, std::vector<Index> table);

  static CoarseMap identity(SpacePtr space);

  const SpacePtr& domain() const noexcept { return domain_; }
  const SpacePtr& codomain() const noexcept { return codomain_; }
  const std::vector<Index>& table() const noexcept { return table_; }
  Index operator()(Index x) const { return table_.at(x); }

  bool injective() const;
  bool bijective() const;
  /// Throws NotBijective with a collision or missed point as witness.
  void require_bijective() const;
  CoarseMap inverse() const;
  PointSet image(const PointSet& set) const;

  friend bool operator==(const CoarseMap& a, const CoarseMap& b) {
    return a.domain_ == b.domain_ && a.codomain_ == b.codomain_ && a.table_ == b.table_;
  }

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
  std::vector<Index> table_;
};

/// g ∘ f.
CoarseMap compose(const CoarseMap& g, const CoarseMap& f);

struct ExpansionProfile {
  /// (r, s) pairs in ascending r.
  std::vector<std::pair<double, double>> samples;

  double at(double r) const;
  bool monotone() const;
};

/// Least s with d_X(x,x') <= r implying d_Y(f x, f x') <= s, by full pair scan.
ExpansionProfile expansion_profile(const CoarseMap& map, std::span<const double> radii);

/// max over x of d_Y(f(x), g(x)). Throws DomainMismatch.
double closeness(const CoarseMap& f, const CoarseMap& g);

struct MutualInverseReport {
  double closeness_fg_id = 0.0;  // closeness(f∘g, id_Y)
  double closeness_gf_id = 0.0;  // closeness(g∘f, id_X)
  ExpansionProfile expansion_f;
  ExpansionProfile expansion_g;
};

MutualInverseReport verify_mutual_inverse(const CoarseMap& f, const CoarseMap& g,
                                          std::span<const double> radii);

}  // namespace roe
