#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "roe/generators.hpp"
#include "roe/iso.hpp"
#include "roe/operator.hpp"

using namespace roe;

namespace {

Matrix shift(std::size_t n) {
  Matrix m = Matrix::Zero(Eigen::Index(n), Eigen::Index(n));
  for (Eigen::Index x = 0; x + 1 < Eigen::Index(n); ++x) m(x + 1, x) = 1.0;
  return m;
}

Matrix random_banded(const FiniteMetricSpace& s, double band, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const auto n = Eigen::Index(s.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (s.dist(Index(i), Index(j)) <= band) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("indicator") {
  auto p5 = gen::path(5);
  CHECK(indicator(p5, {}).matrix().isZero());
  CHECK(indicator(p5, all_points(*p5)).matrix().isIdentity());
  Matrix expect = Matrix::Zero(5, 5);
  expect(1, 1) = expect(3, 3) = 1.0;
  CHECK(indicator(p5, {1, 3}).matrix() == expect);
}

TEST_CASE("operator construction checks shape and finiteness") {
  auto p5 = gen::path(5);
  CHECK_THROWS_WITH_AS(LinearOperator(p5, Matrix::Zero(4, 5)), doctest::Contains("SpaceMismatch"), Error);
  Matrix bad = Matrix::Zero(5, 5);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LinearOperator(p5, bad), Error);
}

TEST_CASE("propagation") {
  auto p5 = gen::path(5);
  CHECK(propagation(LinearOperator::identity(p5)) == 0);
  CHECK(propagation(LinearOperator(p5, shift(5))) == 1);
  CHECK(propagation(LinearOperator(p5, Matrix::Ones(5, 5))) == 4);
  CHECK(propagation(LinearOperator::zero(p5)) == 0);
  Matrix tiny = Matrix::Identity(5, 5);
  tiny(0, 4) = 1e-13;
  CHECK(propagation(LinearOperator(p5, tiny)) == 0);
  CHECK(propagation(LinearOperator(p5, tiny), 0.0) == 4);
  CHECK_THROWS_WITH_AS(propagation(LinearOperator(p5, gen::path(5), Matrix::Identity(5, 5))),
                       doctest::Contains("SpaceMismatch"), Error);

  auto g = gen::grid(4, 4);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    LinearOperator a(g, random_banded(*g, 1 + t % 3, rng));
    LinearOperator b(g, random_banded(*g, t % 2, rng));
    CHECK(propagation(a * b) <= propagation(a) + propagation(b));
  }
}

TEST_CASE("quasi_local_profile") {
  auto p5 = gen::path(5);
  const std::vector<double> r1{1}, r2{2}, r4{4};
  CHECK(quasi_local_profile(LinearOperator::identity(p5), r1).samples[0].second == 0);
  CHECK(quasi_local_profile(LinearOperator(p5, shift(5)), r2).samples[0].second == 0);
  CHECK(quasi_local_profile(LinearOperator(p5, Matrix::Ones(5, 5)), r4).samples[0].second ==
        doctest::Approx(1.0).epsilon(1e-12));

  auto g = gen::grid(4, 5);
  std::mt19937_64 rng(9);
  const std::vector<double> radii{0, 1, 2, 3, 4, 5, 6, 7, 8};
  for (int t = 0; t < 10; ++t) {
    LinearOperator a(g, random_banded(*g, 4, rng));
    const auto prof = quasi_local_profile(a, radii);
    CHECK(prof.samples[0].second == doctest::Approx(oracle::svd_norm(a.matrix())).epsilon(1e-9));
    for (std::size_t i = 1; i < prof.samples.size(); ++i) {
      CHECK(prof.samples[i].second <= prof.samples[i - 1].second + 1e-9);
      if (prof.samples[i].first > propagation(a)) CHECK(prof.samples[i].second == 0);
    }
    // Compression bound for a pair of separated blocks.
    const PointSet a_set{0, 1, 5};
    const PointSet b_set{14, 18, 19};
    const double gap = g->set_distance(a_set, b_set);
    const std::vector<double> rg{gap};
    CHECK(block_norm(a, a_set, b_set) <= quasi_local_profile(a, rg).samples[0].second + 1e-9);
  }
}

TEST_CASE("block_norm") {
  auto p5 = gen::path(5);
  LinearOperator s(p5, shift(5));
  CHECK(block_norm(s, {}, {0, 1}) == 0);
  CHECK(block_norm(LinearOperator::identity(p5), {0}, {0}) == doctest::Approx(1.0));
  CHECK(block_norm(s, {1}, {0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(block_norm(s, {9}, {0}), Error);
}

TEST_CASE("conditional_expectation") {
  auto two = FiniteMetricSpace::build({"a", "b"}, {0, 1, 1, 0});
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1;
  expect(1, 1) = 4;
  CHECK(conditional_expectation(LinearOperator(two, m)).matrix() == expect);
  auto p5 = gen::path(5);
  CHECK(conditional_expectation(LinearOperator(p5, shift(5))).matrix().isZero());
  Matrix d = Matrix::Zero(5, 5);
  d.diagonal() << 1, 2, 3, 4, 5;
  CHECK(conditional_expectation(LinearOperator(p5, d)).matrix() == d);
}

TEST_CASE("op_norm against a dense SVD") {
  CHECK(op_norm(Matrix::Identity(6, 6)) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix m(2, 2);
  m << 0, 2, 0, 0;
  CHECK(op_norm(m) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_norm(Matrix::Zero(4, 4)) == 0.0);
  Matrix hard(2, 2);
  hard << 1, -1, -1, 1;  // all-ones start is orthogonal to the top singular vector
  CHECK(op_norm(hard) == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int t = 0; t < 30; ++t) {
    Matrix a(12, 9);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
    CHECK(std::abs(op_norm(a) - oracle::svd_norm(a)) <= 1e-8 * oracle::svd_norm(a));
  }
}

TEST_CASE("numerical_rank") {
  auto p5 = gen::path(5);
  CHECK(numerical_rank(indicator(p5, {0, 2, 4})) == 3);
  CHECK(numerical_rank(Matrix::Zero(5, 5)) == 0);
  std::mt19937_64 rng(3);
  const Matrix u = haar_unitary(5, rng);
  CHECK(numerical_rank(u * indicator(p5, {0, 2, 4}).matrix() * u.adjoint()) == 3);
  Matrix low = Matrix::Zero(6, 6);
  low.col(0).setOnes();
  low.col(1).setOnes();
  CHECK(numerical_rank(low) == oracle::svd_rank(low, 1e-9));
}
