#include "roe/iso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "roe/parallel.hpp"

namespace roe {

SpatialIsomorphism::SpatialIsomorphism(SpacePtr source, SpacePtr target, Matrix u)
    : source_(std::move(source)), target_(std::move(target)), u_(std::move(u)) {
  if (!source_ || !target_) throw Error(ErrorCode::InvalidParams, "isomorphism needs both spaces");
  if (source_->size() != target_->size()) {
    throw Error(ErrorCode::SpaceMismatch, "spatial isomorphisms need |X| == |Y| (got " +
                                              std::to_string(source_->size()) + " and " +
                                              std::to_string(target_->size()) + ")");
  }
  if (std::size_t(u_.rows()) != target_->size() || std::size_t(u_.cols()) != source_->size()) {
    throw Error(ErrorCode::SpaceMismatch, "unitary has the wrong shape");
  }
  if (!u_.allFinite()) throw Error(ErrorCode::NotUnitary, "non-finite entries");
  const double defect = unitarity_defect(u_);
  if (defect > kUnitaryTol) {
    throw Error(ErrorCode::NotUnitary, "||u*u - I|| bound " + std::to_string(defect) +
                                           " exceeds tolerance");
  }
}

LinearOperator SpatialIsomorphism::apply(const LinearOperator& a) const {
  if (a.domain() != source_ || a.codomain() != source_) {
    throw Error(ErrorCode::SpaceMismatch, "apply expects an operator on the source space");
  }
  return LinearOperator(target_, u_ * a.matrix() * u_.adjoint());
}

LinearOperator SpatialIsomorphism::apply_inverse(const LinearOperator& b) const {
  if (b.domain() != target_ || b.codomain() != target_) {
    throw Error(ErrorCode::SpaceMismatch, "apply_inverse expects an operator on the target space");
  }
  return LinearOperator(source_, u_.adjoint() * b.matrix() * u_);
}

SpatialIsomorphism SpatialIsomorphism::inverse() const {
  return SpatialIsomorphism(target_, source_, u_.adjoint());
}

double SpatialIsomorphism::column_weight(Index x, Index z) const {
  source_->check_index(x);
  target_->check_index(z);
  return std::abs(u_(Eigen::Index(z), Eigen::Index(x)));
}

double SpatialIsomorphism::residual_squared(Index x, const PointSet& kept) const {
  source_->check_index(x);
  double total = 0.0;
  auto it = kept.begin();
  for (Index z = 0; z < target_->size(); ++z) {
    if (it != kept.end() && *it == z) {
      ++it;
      continue;
    }
    total += std::norm(u_(Eigen::Index(z), Eigen::Index(x)));
  }
  return total;
}

SpatialIsomorphism from_bijection(const CoarseMap& f, const std::optional<std::vector<Complex>>& phases) {
  f.require_bijective();
  const auto n = Eigen::Index(f.table().size());
  if (phases && phases->size() != f.table().size()) {
    throw Error(ErrorCode::InvalidParams, "one phase per source point required");
  }
  Matrix u = Matrix::Zero(n, n);
  for (Index x = 0; x < f.table().size(); ++x) {
    Complex lambda = 1.0;
    if (phases) {
      lambda = (*phases)[x];
      if (std::abs(std::abs(lambda) - 1.0) > 1e-12) {
        throw Error(ErrorCode::NonUnitPhase, "phase at " + f.domain()->id(x) + " has modulus " +
                                                 std::to_string(std::abs(lambda)));
      }
    }
    u(Eigen::Index(f(x)), Eigen::Index(x)) = lambda;
  }
  return SpatialIsomorphism(f.domain(), f.codomain(), std::move(u));
}

std::vector<PointSet> greedy_cells(const FiniteMetricSpace& space, double radius) {
  std::vector<PointSet> cells;
  std::vector<char> used(space.size(), 0);
  for (Index p = 0; p < space.size(); ++p) {
    if (used[p]) continue;
    PointSet cell{p};
    used[p] = 1;
    for (Index q = p + 1; q < space.size(); ++q) {
      if (used[q]) continue;
      const bool fits = std::all_of(cell.begin(), cell.end(),
                                    [&](Index c) { return space.within(space.dist(q, c), radius); });
      if (fits) {
        cell.push_back(q);
        used[q] = 1;
      }
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

Matrix haar_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  Matrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mod = std::abs(d);
    q.col(j) *= mod > 0.0 ? d / mod : Complex(1.0);
  }
  return q;
}

LinearOperator random_local_unitary(SpacePtr space, double radius, std::uint64_t seed) {
  if (radius < 0.0) throw Error(ErrorCode::InvalidParams, "radius must be >= 0");
  std::mt19937_64 rng(seed);
  const auto n = Eigen::Index(space->size());
  Matrix w = Matrix::Zero(n, n);
  for (const auto& cell : greedy_cells(*space, radius)) {
    const Matrix block = haar_unitary(Eigen::Index(cell.size()), rng);
    for (std::size_t j = 0; j < cell.size(); ++j) {
      for (std::size_t i = 0; i < cell.size(); ++i) {
        w(Eigen::Index(cell[i]), Eigen::Index(cell[j])) = block(Eigen::Index(i), Eigen::Index(j));
      }
    }
  }
  return LinearOperator(std::move(space), std::move(w));
}

SpatialIsomorphism perturb(const SpatialIsomorphism& iso, const LinearOperator& w) {
  if (w.domain() != iso.source() || w.codomain() != iso.source()) {
    throw Error(ErrorCode::SpaceMismatch, "perturbation must act on the source space");
  }
  const double defect = unitarity_defect(w.matrix());
  if (defect > kUnitaryTol) {
    throw Error(ErrorCode::NotUnitary, "perturbation is not unitary (defect bound " +
                                           std::to_string(defect) + ")");
  }
  return SpatialIsomorphism(iso.source(), iso.target(), iso.unitary() * w.matrix());
}

PointSet support_set(const SpatialIsomorphism& iso, Index x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParams, "eps must be > 0");
  iso.source()->check_index(x);
  PointSet out;
  for (Index z = 0; z < iso.target()->size(); ++z) {
    if (iso.column_weight(x, z) > eps) out.push_back(z);
  }
  return out;
}

PointSet SupportFamily::union_of(const PointSet& points) const {
  PointSet out;
  for (Index x : points) out = set_union(out, sets.at(x));
  return out;
}

std::vector<Index> SupportFamily::empty_points() const {
  std::vector<Index> out;
  for (Index x = 0; x < sets.size(); ++x) {
    if (sets[x].empty()) out.push_back(x);
  }
  return out;
}

double SupportFamily::max_diameter() const {
  double best = 0.0;
  for (const auto& s : sets) {
    for (Index a : s) {
      for (Index b : s) best = std::max(best, target->dist(a, b));
    }
  }
  return best;
}

SupportFamily support_family(const SpatialIsomorphism& iso, double eps, double m) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParams, "eps must be > 0");
  if (m < 0.0) throw Error(ErrorCode::InvalidParams, "m must be >= 0");
  SupportFamily family{iso.source(), iso.target(), {}, {}};
  family.params.kind = SupportParams::Kind::Support;
  family.params.eps = eps;
  family.params.m = m;
  family.sets.resize(iso.source()->size());
  parallel_for(family.sets.size(), [&](std::size_t x) {
    family.sets[x] = ball(*iso.target(), support_set(iso, x, eps), m);
  });
  return family;
}

SupportFamily support_family_flattened(const SpatialIsomorphism& iso, double r, double threshold) {
  if (!(r > 0.0)) throw Error(ErrorCode::NonpositiveRadius, "radius must be > 0");
  SupportFamily family{iso.source(), iso.target(), {}, {}};
  family.params.kind = SupportParams::Kind::Flattened;
  family.params.r = r;
  family.params.threshold = threshold;
  const auto& u = iso.unitary();
  const std::size_t n = iso.source()->size();
  family.sets.resize(n);
  // Phi(g) = u diag(g) u*, so column y of Phi(g) is u diag(g) (row y of u)^*
  // and its norm is || diag(g) (row y of u)^* ||.
  parallel_for(n, [&](std::size_t x) {
    const auto g = flattened_indicator(iso.source(), PointSet{x}, r);
    PointSet out;
    for (Index y = 0; y < iso.target()->size(); ++y) {
      double sq = 0.0;
      for (Index k = 0; k < n; ++k) {
        if (g(k) != 0.0) sq += g(k) * g(k) * std::norm(u(Eigen::Index(y), Eigen::Index(k)));
      }
      if (std::sqrt(sq) > threshold) out.push_back(y);
    }
    family.sets[x] = std::move(out);
  });
  return family;
}

NoFeasibleEps::NoFeasibleEps(double best_residual, std::vector<EpsilonRow> table)
    : Error(ErrorCode::NoFeasibleEps,
            "no grid eps achieves the target; best residual " + std::to_string(best_residual)),
      best_(best_residual),
      table_(std::move(table)) {}

namespace {

double pointwise_residual(const SpatialIsomorphism& iso, double eps) {
  double worst = 0.0;
  for (Index x = 0; x < iso.source()->size(); ++x) {
    worst = std::max(worst, std::sqrt(iso.residual_squared(x, support_set(iso, x, eps))));
  }
  return worst;
}

}  // namespace

EpsilonSearch epsilon_for_delta(const SpatialIsomorphism& iso, double delta,
                                const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw Error(ErrorCode::InvalidParams, "empty eps grid");
  if (!std::is_sorted(eps_grid.rbegin(), eps_grid.rend())) {
    throw Error(ErrorCode::InvalidParams, "eps grid must be descending");
  }
  const auto inv = iso.inverse();
  EpsilonSearch search;
  std::optional<double> found;
  for (double eps : eps_grid) {
    EpsilonRow row{eps, pointwise_residual(iso, eps), pointwise_residual(inv, eps)};
    if (!found && row.worst() < delta) found = eps;
    search.table.push_back(row);
  }
  if (!found) {
    double best = search.table.front().worst();
    for (const auto& row : search.table) best = std::min(best, row.worst());
    throw NoFeasibleEps(best, std::move(search.table));
  }
  search.eps = *found;
  return search;
}

std::vector<PointSet> sample_sets(const FiniteMetricSpace& space, const SetSampler& sampler) {
  const std::size_t n = space.size();
  std::vector<PointSet> sets;
  if (n <= sampler.exhaustive_limit) {
    const std::uint64_t total = std::uint64_t(1) << n;
    sets.reserve(total - 1);
    for (std::uint64_t mask = 1; mask < total; ++mask) {
      PointSet s;
      for (Index i = 0; i < n; ++i) {
        if (mask & (std::uint64_t(1) << i)) s.push_back(i);
      }
      sets.push_back(std::move(s));
    }
    return sets;
  }
  for (Index x = 0; x < n; ++x) sets.push_back(PointSet{x});
  for (double r : sampler.ball_radii) {
    for (Index x = 0; x < n; ++x) sets.push_back(ball(space, PointSet{x}, r));
  }
  std::mt19937_64 rng(sampler.seed);
  std::vector<Index> order(n);
  for (std::size_t k = 0; k < sampler.random_subsets; ++k) {
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t size = 1 + std::size_t(rng() % n);
    PointSet s(order.begin(), order.begin() + std::ptrdiff_t(size));
    std::sort(s.begin(), s.end());
    sets.push_back(std::move(s));
  }
  return sets;
}

double goal_residual(const SpatialIsomorphism& iso, const PointSet& set, const PointSet& kept) {
  if (set.empty()) return 0.0;
  const PointSet rows = complement(*iso.target(), kept);
  if (rows.empty()) return 0.0;
  return op_norm(submatrix(iso.unitary(), rows, set));
}

namespace {

struct DirectionScan {
  double residual = 0.0;
  PointSet witness;
};

/// Worst residual over `sets` for one direction; ties keep the earliest set.
DirectionScan scan_direction(const SpatialIsomorphism& iso, const std::vector<PointSet>& sets,
                             const std::vector<PointSet>& supports, double m) {
  std::vector<double> values(sets.size(), 0.0);
  parallel_for(sets.size(), [&](std::size_t k) {
    PointSet joined;
    for (Index x : sets[k]) joined = set_union(joined, supports[x]);
    values[k] = goal_residual(iso, sets[k], ball(*iso.target(), joined, m));
  });
  DirectionScan scan;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (values[k] > scan.residual) {
      scan.residual = values[k];
      scan.witness = sets[k];
    }
  }
  return scan;
}

std::vector<PointSet> all_support_sets(const SpatialIsomorphism& iso, double eps) {
  std::vector<PointSet> out(iso.source()->size());
  for (Index x = 0; x < out.size(); ++x) out[x] = support_set(iso, x, eps);
  return out;
}

GoalEstimate combine(const DirectionScan& fwd, const DirectionScan& bwd) {
  GoalEstimate est;
  est.forward = fwd.residual;
  est.backward = bwd.residual;
  if (bwd.residual > fwd.residual) {
    est.residual = bwd.residual;
    est.direction = GoalEstimate::Direction::Backward;
    est.witness = bwd.witness;
  } else {
    est.residual = fwd.residual;
    est.direction = GoalEstimate::Direction::Forward;
    est.witness = fwd.witness;
  }
  return est;
}

}  // namespace

std::vector<GoalCell> goal_table(const SpatialIsomorphism& iso, const std::vector<double>& eps_grid,
                                 const std::vector<double>& m_grid, const SetSampler& sampler) {
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParams, "eps must be > 0");
  }
  for (double m : m_grid) {
    if (m < 0.0) throw Error(ErrorCode::InvalidParams, "m must be >= 0");
  }
  const auto inv = iso.inverse();
  const auto forward_sets = sample_sets(*iso.source(), sampler);
  SetSampler backward_sampler = sampler;
  backward_sampler.seed = sampler.seed ^ 0x9e3779b97f4a7c15ULL;
  const auto backward_sets = sample_sets(*iso.target(), backward_sampler);

  std::vector<GoalCell> cells;
  cells.reserve(eps_grid.size() * m_grid.size());
  for (double eps : eps_grid) {
    const auto fwd_supports = all_support_sets(iso, eps);
    const auto bwd_supports = all_support_sets(inv, eps);
    for (double m : m_grid) {
      const auto fwd = scan_direction(iso, forward_sets, fwd_supports, m);
      const auto bwd = scan_direction(inv, backward_sets, bwd_supports, m);
      cells.push_back(GoalCell{eps, m, combine(fwd, bwd)});
    }
  }
  return cells;
}

GoalEstimate goal_estimate(const SpatialIsomorphism& iso, double eps, double m,
                           const SetSampler& sampler) {
  return goal_table(iso, {eps}, {m}, sampler).front().estimate;
}

}  // namespace roe
