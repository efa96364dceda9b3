#pragma once

#include <vector>

#include "roe/operator.hpp"
#include "roe/space.hpp"

namespace roe {

/// Real function on the points of a finite space (an element of l_inf(X)).
class DiagonalFunction {
 public:
  DiagonalFunction(SpacePtr space, std::vector<double> values);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator()(Index x) const { return values_.at(x); }

  /// Multiplication operator diag(values).
  LinearOperator as_operator() const;

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

/// g_{A,r}(x) = max(0, 1 - d(x,A)/r). Throws EmptySet / NonpositiveRadius.
DiagonalFunction flattened_indicator(SpacePtr space, const PointSet& set, double r);

/// max |f(x) - f(x')| over x, x' outside `excluded` with d(x,x') <= r.
double so_variation(const DiagonalFunction& fn, double r, const PointSet& excluded = {});

struct SeparatedFamily {
  /// sets[k] carries family index first_index + k.
  std::vector<PointSet> sets;
  std::size_t first_index = 1;
  /// The space ran out of room before `count` sets were placed.
  bool exhausted = false;
};

/// Greedy singletons A_n with d(A_n, A_m) >= 2(n+m)·base_gap, scanning points
/// in index order. Returns a short family and sets `exhausted` when the space
/// is too small.
SeparatedFamily separated_family(const FiniteMetricSpace& space, std::size_t count,
                                 double base_gap = 1.0, std::size_t first_index = 1);

/// Sum of g_{A_n, r_n}. The open supports {g > 0} must be pairwise disjoint;
/// throws OverlappingSupports with a witness point otherwise.
DiagonalFunction sum_flattened(SpacePtr space, const std::vector<PointSet>& family,
                               const std::vector<double>& radii);

}  // namespace roe
