#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "roe/generators.hpp"
#include "roe/iso.hpp"

using namespace roe;

namespace {

const Complex kI(0.0, 1.0);

std::vector<std::size_t> as_vec(const PointSet& s) { return {s.begin(), s.end()}; }

SpatialIsomorphism perturbed_grid(std::size_t side, std::uint64_t seed) {
  auto g = gen::grid(side, side);
  return perturb(from_bijection(gen::grid_symmetry(g, side, side, unsigned(seed))),
                 random_local_unitary(g, 1, seed));
}

}  // namespace

TEST_CASE("from_bijection builds the permutation unitary") {
  auto p5 = gen::path(5);
  CHECK(from_bijection(CoarseMap::identity(p5)).unitary().isIdentity());
  const Matrix anti = from_bijection(gen::reversal(p5)).unitary();
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) CHECK(anti(i, j) == Complex(i + j == 4 ? 1.0 : 0.0));

  const auto twisted = from_bijection(gen::reversal(p5), std::vector<Complex>(5, kI));
  const auto plain = from_bijection(gen::reversal(p5));
  for (Index x = 0; x < 5; ++x) {
    const Matrix a = twisted.apply(indicator(p5, {x})).matrix();
    CHECK((a - plain.apply(indicator(p5, {x})).matrix()).norm() < 1e-15);
    CHECK(a == indicator(p5, {4 - x}).matrix());
  }

  CHECK_THROWS_WITH_AS(from_bijection(CoarseMap(p5, p5, {0, 0, 1, 2, 3})), doctest::Contains("NotBijective"),
                       Error);
  CHECK_THROWS_WITH_AS(from_bijection(CoarseMap::identity(p5), std::vector<Complex>(5, 1.1)),
                       doctest::Contains("NonUnitPhase"), Error);
}

TEST_CASE("construction rejects non-unitary or mismatched matrices") {
  auto p5 = gen::path(5);
  CHECK_THROWS_WITH_AS(SpatialIsomorphism(p5, p5, 1.001 * Matrix::Identity(5, 5)), doctest::Contains("NotUnitary"),
                       Error);
  CHECK_THROWS_WITH_AS(SpatialIsomorphism(p5, gen::path(4), Matrix::Identity(5, 5)),
                       doctest::Contains("SpaceMismatch"), Error);
}

TEST_CASE("random_local_unitary") {
  auto p5 = gen::path(5);
  const auto cells = greedy_cells(*p5, 1);
  CHECK(cells == std::vector<PointSet>{{0, 1}, {2, 3}, {4}});

  const auto w0 = random_local_unitary(p5, 0, 4);
  CHECK(propagation(w0) == 0);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(std::abs(w0.matrix()(i, i)) - 1.0) < 1e-12);

  const auto w1 = random_local_unitary(p5, 1, 4);
  CHECK(propagation(w1, 1e-10) <= 1);
  CHECK(random_local_unitary(p5, 1, 4).matrix() == w1.matrix());

  auto g = gen::grid(6, 6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (double radius : {0.0, 1.0, 2.0}) {
      const auto w = random_local_unitary(g, radius, seed);
      const Matrix defect = w.matrix().adjoint() * w.matrix() - Matrix::Identity(36, 36);
      CHECK(oracle::svd_norm(defect) <= 1e-10);
      CHECK(propagation(w, 1e-10) <= radius);
    }
  }
}

TEST_CASE("perturb composes unitaries") {
  auto p5 = gen::path(5);
  const auto base = from_bijection(gen::reversal(p5));
  CHECK(perturb(base, LinearOperator::identity(p5)).unitary() == base.unitary());

  Matrix phases = Matrix::Zero(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i) phases(i, i) = std::polar(1.0, 0.3 * double(i + 1));
  const auto twisted = perturb(base, LinearOperator(p5, phases));
  for (Index x = 0; x < 5; ++x) {
    CHECK((twisted.apply(indicator(p5, {x})).matrix() - base.apply(indicator(p5, {x})).matrix()).norm() < 1e-14);
  }
  CHECK_THROWS_WITH_AS(perturb(base, LinearOperator(p5, 2.0 * Matrix::Identity(5, 5))),
                       doctest::Contains("NotUnitary"), Error);
}

TEST_CASE("apply and apply_inverse") {
  auto g = gen::grid(3, 4);
  const auto f = gen::random_bce(g, 2, 9);
  const auto iso = from_bijection(f);
  CHECK(iso.apply(LinearOperator::identity(g)).matrix().isApprox(Matrix::Identity(12, 12)));
  const PointSet a{1, 5, 6};
  CHECK(iso.apply(indicator(g, a)).matrix() == indicator(g, f.image(a)).matrix());

  const auto p = perturbed_grid(4, 2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Matrix m(16, 16);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(n(rng), n(rng));
  const LinearOperator op(p.source(), m);
  const Matrix back = p.apply_inverse(p.apply(op)).matrix();
  CHECK((back - m).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("isometry and rank preservation") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto iso = perturbed_grid(4, seed);
    Matrix m(16, 16);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(n(rng), n(rng));
    const LinearOperator a(iso.source(), m);
    CHECK(std::abs(op_norm(iso.apply(a)) - oracle::svd_norm(m)) <= 1e-8 * oracle::svd_norm(m));
    const PointSet set{0, 3, 7, 11};
    CHECK(numerical_rank(iso.apply(indicator(iso.source(), set))) == set.size());
  }
}

TEST_CASE("support_set matches the full conjugation oracle") {
  auto p5 = gen::path(5);
  const auto rev = from_bijection(gen::reversal(p5));
  for (double eps : {0.05, 0.5, 0.99}) {
    for (Index x = 0; x < 5; ++x) CHECK(support_set(rev, x, eps) == PointSet{4 - x});
  }
  for (Index x = 0; x < 5; ++x) CHECK(support_set(rev, x, 1.0).empty());

  const auto iso = perturbed_grid(4, 5);
  for (Index x = 0; x < 16; ++x) {
    const auto norms = oracle::column_norms(iso.unitary(), x);
    for (double eps : {0.05, 0.2, 0.5}) {
      PointSet expect;
      for (Index z = 0; z < 16; ++z)
        if (norms[z] > eps) expect.push_back(z);
      CHECK(support_set(iso, x, eps) == expect);
    }
    const auto loose = support_set(iso, x, 0.1);
    const auto tight = support_set(iso, x, 0.3);
    CHECK(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()));
  }
}

TEST_CASE("support symmetry through unitarity") {
  const auto iso = perturbed_grid(4, 7);
  const auto inv = iso.inverse();
  for (Index x = 0; x < 16; ++x)
    for (Index y = 0; y < 16; ++y) CHECK(std::abs(iso.column_weight(x, y) - inv.column_weight(y, x)) < 1e-12);

  auto g = gen::grid(3, 3);
  const auto exact = from_bijection(gen::random_bce(g, 2, 1));
  const auto exact_inv = exact.inverse();
  for (Index x = 0; x < 9; ++x)
    for (Index y = 0; y < 9; ++y) {
      const auto yx = support_set(exact, x, 0.5);
      const auto xy = support_set(exact_inv, y, 0.5);
      CHECK(std::binary_search(yx.begin(), yx.end(), y) == std::binary_search(xy.begin(), xy.end(), x));
    }
}

TEST_CASE("support_family") {
  auto p5 = gen::path(5);
  const auto f = gen::reversal(p5);
  const auto fam = support_family(from_bijection(f), 0.5, 0);
  for (Index x = 0; x < 5; ++x) CHECK(fam.sets[x] == PointSet{f(x)});
  CHECK_FALSE(fam.has_empty());

  const auto big = support_family(from_bijection(f), 0.5, p5->diameter());
  for (const auto& s : big.sets) CHECK(s == all_points(*p5));

  const auto none = support_family(from_bijection(f), 1.0, 2);
  CHECK(none.has_empty());
  CHECK(none.empty_points().size() == 5);

  const auto iso = perturbed_grid(4, 1);
  const auto small = support_family(iso, 0.3, 1);
  const auto larger = support_family(iso, 0.3, 2);
  for (Index x = 0; x < 16; ++x)
    CHECK(std::includes(larger.sets[x].begin(), larger.sets[x].end(), small.sets[x].begin(), small.sets[x].end()));
}

TEST_CASE("support_family_flattened") {
  auto p5 = gen::path(5);
  const auto f = gen::reversal(p5);
  const auto fam = support_family_flattened(from_bijection(f), p5->min_positive_distance(), 0.5);
  for (Index x = 0; x < 5; ++x) CHECK(fam.sets[x] == PointSet{f(x)});

  CHECK(support_family_flattened(from_bijection(f), 2, 1.0).has_empty());

  const auto id = from_bijection(CoarseMap::identity(p5));
  const double r = p5->diameter();
  const auto wide = support_family_flattened(id, r, 0.5);
  for (Index x = 0; x < 5; ++x) {
    const auto g = flattened_indicator(p5, {x}, r);
    PointSet expect;
    for (Index y = 0; y < 5; ++y)
      if (g(y) > 0.5) expect.push_back(y);
    CHECK(wide.sets[x] == expect);
  }
}

TEST_CASE("epsilon_for_delta") {
  const std::vector<double> grid{0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  auto g = gen::grid(4, 4);
  const auto exact = epsilon_for_delta(from_bijection(gen::random_bce(g, 2, 3)), 0.1, grid);
  CHECK(exact.eps == 0.5);
  for (const auto& row : exact.table) CHECK(row.worst() == 0);

  const auto iso = perturbed_grid(4, 3);
  const auto loose = epsilon_for_delta(iso, 1.5, grid);
  CHECK(loose.eps == 0.5);
  for (std::size_t i = 1; i < loose.table.size(); ++i) {
    CHECK(loose.table[i].forward <= loose.table[i - 1].forward + 1e-12);
    CHECK(loose.table[i].backward <= loose.table[i - 1].backward + 1e-12);
  }
  CHECK_THROWS_AS(epsilon_for_delta(iso, 1e-6, {0.9}), NoFeasibleEps);
  CHECK_THROWS_WITH_AS(epsilon_for_delta(iso, 0.5, {0.1, 0.2}), doctest::Contains("InvalidParams"), Error);
}

TEST_CASE("goal_residual matches the full conjugation oracle") {
  const auto iso = perturbed_grid(4, 11);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    PointSet a, kept;
    for (Index x = 0; x < 16; ++x) {
      if (rng() % 3 == 0) a.push_back(x);
      if (rng() % 2 == 0) kept.push_back(x);
    }
    CHECK(std::abs(goal_residual(iso, a, kept) - oracle::goal_residual(iso.unitary(), as_vec(a), as_vec(kept))) <=
          1e-9);
  }
  CHECK(goal_residual(iso, {}, {}) == 0);
}

TEST_CASE("goal_estimate") {
  auto g = gen::grid(3, 4);
  const auto f = gen::random_bce(g, 2, 5);
  CHECK(goal_estimate(from_bijection(f), 0.5, 0, {}).residual == 0);
  CHECK(goal_estimate(from_bijection(f, gen::random_phases(12, 8)), 0.5, 0, {}).residual == 0);

  // eps above every column weight: nothing kept, residual = ||Phi(chi_A)|| = 1.
  const auto iso = perturbed_grid(3, 1);
  CHECK(goal_estimate(iso, 1.0, 2, {}).residual == doctest::Approx(1.0));
  // m saturating the diameter keeps everything.
  CHECK(goal_estimate(iso, 0.3, iso.target()->diameter(), {}).residual == 0);

  const auto table = goal_table(iso, {0.5, 0.3, 0.1}, {0, 1, 2}, {});
  for (const auto& cell : table) {
    const auto single = goal_estimate(iso, cell.eps, cell.m, {});
    CHECK(single.residual == cell.estimate.residual);
  }
}

TEST_CASE("sample_sets") {
  auto p5 = gen::path(5);
  CHECK(sample_sets(*p5, {}).size() == 31);
  auto g = gen::grid(5, 5);
  SetSampler s;
  s.seed = 4;
  const auto a = sample_sets(*g, s);
  CHECK(a == sample_sets(*g, s));
  CHECK(a.size() >= 25);
  for (const auto& set : a) CHECK_FALSE(set.empty());
}
