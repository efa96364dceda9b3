#include <doctest.h>

#include "roe/functions.hpp"
#include "roe/generators.hpp"

using namespace roe;

namespace {

// Brute-force variation over all admissible pairs.
double variation_oracle(const FiniteMetricSpace& s, const std::vector<double>& v, double r, const PointSet& f) {
  double best = 0;
  for (Index x = 0; x < s.size(); ++x) {
    if (std::binary_search(f.begin(), f.end(), x)) continue;
    for (Index y = 0; y < s.size(); ++y) {
      if (std::binary_search(f.begin(), f.end(), y)) continue;
      if (s.dist(x, y) <= r) best = std::max(best, std::abs(v[x] - v[y]));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("flattened_indicator evaluates the bump formula") {
  auto p5 = gen::path(5);
  CHECK(flattened_indicator(p5, {0}, 2).values() == std::vector<double>{1, 0.5, 0, 0, 0});
  const auto whole = flattened_indicator(p5, all_points(*p5), 0.7);
  for (double v : whole.values()) CHECK(v == 1);
  CHECK(flattened_indicator(p5, {2}, 1).values() == std::vector<double>{0, 0, 1, 0, 0});
  CHECK_THROWS_WITH_AS(flattened_indicator(p5, {}, 1), doctest::Contains("EmptySet"), Error);
  CHECK_THROWS_WITH_AS(flattened_indicator(p5, {0}, 0), doctest::Contains("NonpositiveRadius"), Error);

  // g chi_A = chi_A
  auto g = gen::grid(5, 5);
  const PointSet a{3, 7, 12};
  const auto bump = flattened_indicator(g, a, 2.5);
  for (Index x : a) CHECK(bump(x) == 1);
  for (Index x = 0; x < g->size(); ++x) {
    if (g->distance_to_set(x, a) >= 2.5) CHECK(bump(x) == 0);
  }
}

TEST_CASE("so_variation") {
  auto p5 = gen::path(5);
  CHECK(so_variation(DiagonalFunction(p5, std::vector<double>(5, 0.3)), 3) == 0);
  CHECK(so_variation(flattened_indicator(p5, {0}, 2), 1) == doctest::Approx(0.5));
  CHECK(so_variation(DiagonalFunction(p5, {1, 0, 0, 0, 0}), 1, {0}) == 0);

  auto g = gen::grid(6, 6);
  const auto bump = flattened_indicator(g, {14, 15}, 4);
  for (double r = 0; r <= 4; ++r) {
    CHECK(so_variation(bump, r) <= r / 4 + 1e-12);
    CHECK(so_variation(bump, r) == doctest::Approx(variation_oracle(*g, bump.values(), r, {})));
    CHECK(so_variation(bump, r) <= so_variation(bump, r + 1));
    CHECK(so_variation(bump, r, {14, 15, 20}) <= so_variation(bump, r, {14}));
  }
}

TEST_CASE("separated_family") {
  auto p100 = gen::path(100);
  const auto fam = separated_family(*p100, 3);
  REQUIRE(fam.sets.size() == 3);
  CHECK_FALSE(fam.exhausted);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      CHECK(p100->set_distance(fam.sets[i], fam.sets[j]) >= 2.0 * double(fam.first_index * 2 + i + j));

  const auto small = separated_family(*gen::path(5), 3);
  CHECK(small.sets.size() < 3);
  CHECK(small.exhausted);

  const auto single = separated_family(*p100, 1);
  CHECK(single.sets.size() == 1);
  CHECK_FALSE(single.exhausted);
}

TEST_CASE("sum_flattened") {
  auto p100 = gen::path(100);
  CHECK(sum_flattened(p100, {{10}}, {2}).values() == flattened_indicator(p100, {10}, 2).values());

  const auto sum = sum_flattened(p100, {{10}, {50}}, {2, 3});
  const auto a = flattened_indicator(p100, {10}, 2);
  const auto b = flattened_indicator(p100, {50}, 3);
  for (Index x = 0; x < 100; ++x) CHECK(sum(x) == std::max(a(x), b(x)));

  CHECK_THROWS_WITH_AS(sum_flattened(p100, {{10}, {12}}, {2, 2}), doctest::Contains("OverlappingSupports"),
                       Error);
  // Touching closed supports with disjoint open supports are fine.
  CHECK_NOTHROW(sum_flattened(p100, {{10}, {14}}, {2, 2}));
}

TEST_CASE("variation bound on a separated family") {
  auto p200 = gen::path(200);
  const auto fam = separated_family(*p200, 3);
  REQUIRE(fam.sets.size() == 3);
  std::vector<double> radii;
  for (std::size_t k = 0; k < 3; ++k) radii.push_back(double(fam.first_index + k));
  const auto gm = sum_flattened(p200, fam.sets, radii);
  for (std::size_t n = 2; n <= 3; ++n) {
    PointSet centers;
    for (std::size_t k = 0; k < fam.sets.size() && fam.first_index + k <= n; ++k)
      centers = set_union(centers, fam.sets[k]);
    const auto excluded = ball(*p200, centers, double(n));
    for (std::size_t r = 1; r < n; ++r) {
      const double v = so_variation(gm, double(r), excluded);
      CHECK(v <= double(r) / double(n) + 1e-12);
      CHECK(v == doctest::Approx(variation_oracle(*p200, gm.values(), double(r), excluded)));
    }
  }
}
