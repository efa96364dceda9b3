#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "roe/functions.hpp"
#include "roe/operator.hpp"
#include "roe/space.hpp"

namespace roe {

/// Tolerance on ||u*u - I|| accepted at construction.
inline constexpr double kUnitaryTol = 1e-10;

/// Phi = Ad(u): a -> u a u* from operators on `source` to operators on
/// `target`. u is square, so |source| == |target|.
class SpatialIsomorphism {
 public:
  /// Throws SpaceMismatch for a shape mismatch and NotUnitary when u fails
  /// the unitarity check.
  SpatialIsomorphism(SpacePtr source, SpacePtr target, Matrix u);

  const SpacePtr& source() const noexcept { return source_; }
  const SpacePtr& target() const noexcept { return target_; }
  const Matrix& unitary() const noexcept { return u_; }

  LinearOperator apply(const LinearOperator& a) const;
  LinearOperator apply_inverse(const LinearOperator& b) const;

  /// Phi^{-1} = Ad(u*), as an isomorphism from target to source.
  SpatialIsomorphism inverse() const;

  /// ||Phi(chi_x) chi_z||. Phi(chi_x) = u_x u_x^* for the unit column u_x,
  /// so column z has norm |u(z, x)|.
  double column_weight(Index x, Index z) const;

  /// Sum over points of the squared column weights outside `kept`, i.e.
  /// ||(1 - chi_kept) Phi(chi_x)||^2.
  double residual_squared(Index x, const PointSet& kept) const;

 private:
  SpacePtr source_;
  SpacePtr target_;
  Matrix u_;
};

/// u_f with u delta_x = lambda_x delta_{f(x)}. Throws NotBijective /
/// NonUnitPhase.
SpatialIsomorphism from_bijection(const CoarseMap& f,
                                  const std::optional<std::vector<Complex>>& phases = std::nullopt);

/// Greedy partition into cells of diameter <= radius, in point order.
std::vector<PointSet> greedy_cells(const FiniteMetricSpace& space, double radius);

/// Block-diagonal unitary with one Haar-random block per greedy cell.
LinearOperator random_local_unitary(SpacePtr space, double radius, std::uint64_t seed);

/// Haar-random n x n unitary (QR of a complex Gaussian, phase-fixed).
Matrix haar_unitary(Eigen::Index n, std::mt19937_64& rng);

/// Ad(u) ∘ Ad(w) = Ad(uw). Throws NotUnitary / SpaceMismatch.
SpatialIsomorphism perturb(const SpatialIsomorphism& iso, const LinearOperator& w);

/// Y_{x,eps} = { z : ||Phi(chi_x) chi_z|| > eps }.
PointSet support_set(const SpatialIsomorphism& iso, Index x, double eps);

struct SupportParams {
  enum class Kind { Support, Flattened };
  Kind kind = Kind::Support;
  double eps = 0.0;
  double m = 0.0;
  double r = 0.0;
  double threshold = 0.5;
};

/// x -> finite subset of the target, with the parameters that built it.
struct SupportFamily {
  SpacePtr source;
  SpacePtr target;
  std::vector<PointSet> sets;
  SupportParams params;

  /// Union of sets[x] over x in `points`.
  PointSet union_of(const PointSet& points) const;
  std::vector<Index> empty_points() const;
  bool has_empty() const { return !empty_points().empty(); }
  /// Largest diameter of a single set (0 for empty / singleton sets).
  double max_diameter() const;
};

/// alpha(x) = B_m(Y_{x,eps}).
SupportFamily support_family(const SpatialIsomorphism& iso, double eps, double m);

/// alpha_r(x) = { y : ||Phi(g_{x,r}) chi_y|| > threshold }.
SupportFamily support_family_flattened(const SpatialIsomorphism& iso, double r,
                                       double threshold = 0.5);

struct EpsilonRow {
  double eps = 0.0;
  double forward = 0.0;   // max_x ||(1 - chi_{Y_{x,eps}}) Phi(chi_x)||
  double backward = 0.0;  // max_y ||(1 - chi_{X_{y,eps}}) Phi^{-1}(chi_y)||
  double worst() const { return std::max(forward, backward); }
};

struct EpsilonSearch {
  double eps = 0.0;
  std::vector<EpsilonRow> table;
};

class NoFeasibleEps : public Error {
 public:
  NoFeasibleEps(double best_residual, std::vector<EpsilonRow> table);
  double best_residual() const noexcept { return best_; }
  const std::vector<EpsilonRow>& table() const noexcept { return table_; }

 private:
  double best_;
  std::vector<EpsilonRow> table_;
};

/// Largest eps in the descending grid whose pointwise residuals are all
/// below delta.
EpsilonSearch epsilon_for_delta(const SpatialIsomorphism& iso, double delta,
                                const std::vector<double>& eps_grid);

/// Finite subsets over which the GOAL residual is maximized. Exhaustive up to
/// `exhaustive_limit` points; otherwise singletons, balls and seeded random
/// subsets, so the result is a lower bound on the true supremum.
struct SetSampler {
  std::uint64_t seed = 0;
  std::size_t exhaustive_limit = 12;
  std::vector<double> ball_radii{1.0, 2.0, 3.0};
  std::size_t random_subsets = 200;
};

std::vector<PointSet> sample_sets(const FiniteMetricSpace& space, const SetSampler& sampler);

/// ||(1 - chi_kept) Phi(chi_A)||, using Phi(chi_A) = u_A u_A^* with u_A
/// having orthonormal columns.
double goal_residual(const SpatialIsomorphism& iso, const PointSet& set, const PointSet& kept);

struct GoalEstimate {
  enum class Direction { Forward, Backward };
  double residual = 0.0;
  double forward = 0.0;
  double backward = 0.0;
  Direction direction = Direction::Forward;
  PointSet witness;
};

/// max over sampled A of ||(1 - chi_{B_m(Y_{A,eps})}) Phi(chi_A)|| and the
/// symmetric term for Phi^{-1}.
GoalEstimate goal_estimate(const SpatialIsomorphism& iso, double eps, double m,
                           const SetSampler& sampler);

struct GoalCell {
  double eps = 0.0;
  double m = 0.0;
  GoalEstimate estimate;
};

/// goal_estimate over a grid, sharing one set sample for every cell.
std::vector<GoalCell> goal_table(const SpatialIsomorphism& iso, const std::vector<double>& eps_grid,
                                 const std::vector<double>& m_grid, const SetSampler& sampler);

}  // namespace roe
