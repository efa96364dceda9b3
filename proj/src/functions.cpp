#include "roe/functions.hpp"

#include <algorithm>
#include <cmath>

namespace roe {

DiagonalFunction::DiagonalFunction(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_->size()) {
    throw Error(ErrorCode::SpaceMismatch, "function must be defined on every point");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NumericalFailure, "non-finite function value");
  }
}

LinearOperator DiagonalFunction::as_operator() const {
  const auto n = Eigen::Index(values_.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = values_[std::size_t(i)];
  return LinearOperator(space_, std::move(m));
}

DiagonalFunction flattened_indicator(SpacePtr space, const PointSet& set, double r) {
  if (set.empty()) throw Error(ErrorCode::EmptySet, "flattened indicator of the empty set");
  if (!(r > 0.0)) throw Error(ErrorCode::NonpositiveRadius, "radius must be > 0");
  for (Index a : set) space->check_index(a);
  std::vector<double> values(space->size());
  for (Index x = 0; x < values.size(); ++x) {
    values[x] = std::max(0.0, 1.0 - space->distance_to_set(x, set) / r);
  }
  return DiagonalFunction(std::move(space), std::move(values));
}

double so_variation(const DiagonalFunction& fn, double r, const PointSet& excluded) {
  const auto& space = *fn.space();
  std::vector<char> skip(space.size(), 0);
  for (Index x : excluded) {
    space.check_index(x);
    skip[x] = 1;
  }
  double best = 0.0;
  for (Index x = 0; x < space.size(); ++x) {
    if (skip[x]) continue;
    for (Index y = x + 1; y < space.size(); ++y) {
      if (skip[y] || !space.within(space.dist(x, y), r)) continue;
      best = std::max(best, std::abs(fn(x) - fn(y)));
    }
  }
  return best;
}

SeparatedFamily separated_family(const FiniteMetricSpace& space, std::size_t count,
                                 double base_gap, std::size_t first_index) {
  SeparatedFamily family;
  family.first_index = first_index;
  for (std::size_t k = 0; k < count; ++k) {
    const double n = double(first_index + k);
    bool placed = false;
    for (Index p = 0; p < space.size() && !placed; ++p) {
      bool ok = true;
      for (std::size_t j = 0; j < family.sets.size() && ok; ++j) {
        const double m = double(first_index + j);
        const double gap = 2.0 * (n + m) * base_gap;
        const double d = space.distance_to_set(p, family.sets[j]);
        ok = space.integral() ? d >= gap : d >= gap - kDistanceTol;
      }
      if (ok) {
        family.sets.push_back(PointSet{p});
        placed = true;
      }
    }
    if (!placed) {
      family.exhausted = true;
      break;
    }
  }
  return family;
}

DiagonalFunction sum_flattened(SpacePtr space, const std::vector<PointSet>& family,
                               const std::vector<double>& radii) {
  if (family.size() != radii.size()) {
    throw Error(ErrorCode::InvalidParams, "one radius per family member required");
  }
  std::vector<double> total(space->size(), 0.0);
  std::vector<int> owner(space->size(), -1);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto bump = flattened_indicator(space, family[k], radii[k]);
    for (Index x = 0; x < total.size(); ++x) {
      if (bump(x) <= 0.0) continue;
      if (owner[x] >= 0) {
        throw Error(ErrorCode::OverlappingSupports,
                    "point " + space->id(x) + " lies in the supports of members " +
                        std::to_string(owner[x]) + " and " + std::to_string(k));
      }
      owner[x] = int(k);
      total[x] += bump(x);
    }
  }
  return DiagonalFunction(std::move(space), std::move(total));
}

}  // namespace roe
