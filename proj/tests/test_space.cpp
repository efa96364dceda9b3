#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "roe/generators.hpp"
#include "roe/space.hpp"

using namespace roe;

namespace {

SpacePtr p5_from_table() {
  std::vector<double> d(25);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) d[std::size_t(i * 5 + j)] = std::abs(i - j);
  return FiniteMetricSpace::build({"0", "1", "2", "3", "4"}, d, "P5");
}

CoarseMap map_of(SpacePtr from, SpacePtr to, std::vector<Index> t) { return CoarseMap(from, to, std::move(t)); }

}  // namespace

TEST_CASE("build_space accepts valid tables") {
  auto one = FiniteMetricSpace::build({"a"}, {0.0});
  CHECK(one->size() == 1);
  CHECK(one->diameter() == 0.0);

  auto p5 = p5_from_table();
  CHECK(p5->size() == 5);
  CHECK(p5->integral());
  for (Index x = 0; x < 5; ++x)
    for (Index y = 0; y < 5; ++y)
      for (Index z = 0; z < 5; ++z) CHECK(p5->dist(x, y) <= p5->dist(x, z) + p5->dist(z, y));
}

TEST_CASE("build_space reports the violated axiom with a witness") {
  const std::vector<double> bad{0, 1, 5, 1, 0, 1, 5, 1, 0};
  try {
    FiniteMetricSpace::build({"0", "1", "2"}, bad);
    FAIL("expected MetricViolation");
  } catch (const MetricViolation& e) {
    CHECK(e.code() == ErrorCode::MetricViolation);
    CHECK(e.kind() == "triangle");
    CHECK(e.witness() == std::vector<std::string>{"0", "1", "2"});
  }
  CHECK_THROWS_AS(FiniteMetricSpace::build({"0", "1"}, {0, 1, 2, 0}), MetricViolation);
  CHECK_THROWS_AS(FiniteMetricSpace::build({"0", "1"}, {0, 0, 0, 0}), MetricViolation);
  CHECK_THROWS_AS(FiniteMetricSpace::build({"0", "1"}, {0, -1, -1, 0}), MetricViolation);
  CHECK_THROWS_AS(FiniteMetricSpace::build({"0", "0"}, {0, 1, 1, 0}), MetricViolation);
  CHECK_THROWS_AS(FiniteMetricSpace::build({"0", "1"}, {0, 1, 1}), MetricViolation);
}

TEST_CASE("from_graph matches a Floyd-Warshall oracle") {
  auto path = gen::path(5);
  CHECK(path->dist(0, 4) == 4);
  auto c8 = gen::cycle(8);
  CHECK(c8->dist(0, 5) == 3);
  CHECK_THROWS_WITH_AS(FiniteMetricSpace::from_graph({"a", "b"}, {}), doctest::Contains("DisconnectedGraph"),
                       Error);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng() % 20;
    std::vector<std::pair<Index, Index>> edges;
    for (Index i = 1; i < n; ++i) edges.emplace_back(rng() % i, i);  // spanning tree keeps it connected
    for (int extra = 0; extra < int(n); ++extra) edges.emplace_back(rng() % n, rng() % n);
    std::vector<std::string> ids;
    for (Index i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
    auto s = FiniteMetricSpace::from_graph(ids, edges);
    const auto ref = oracle::floyd_warshall(n, edges);
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y) REQUIRE(s->dist(x, y) == ref[x][y]);
  }
}

TEST_CASE("ball and growth") {
  auto p5 = p5_from_table();
  CHECK(ball(*p5, {0}, 0) == PointSet{0});
  CHECK(ball(*p5, {0}, 1) == PointSet{0, 1});
  CHECK(ball(*p5, {0, 4}, 1) == PointSet{0, 1, 3, 4});
  CHECK(growth(*p5, 0) == 1);
  CHECK(growth(*p5, 1) == 3);
  CHECK(growth(*p5, 4) == 5);
  CHECK_THROWS_AS(make_set(*p5, {7}), Error);

  auto g = gen::grid(5, 4);
  for (double r = 0; r < 6; ++r) {
    CHECK(growth(*g, r) <= growth(*g, r + 1));
    const auto small = ball(*g, {3}, r);
    const auto big = ball(*g, {3}, r + 1);
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST_CASE("expansion_profile by enumeration") {
  auto p5 = p5_from_table();
  const std::vector<double> r2{2};
  CHECK(expansion_profile(CoarseMap::identity(p5), r2).at(2) == 2);

  auto c8 = gen::cycle(8);
  auto c4 = gen::cycle(4);
  std::vector<Index> mod4(8);
  for (Index i = 0; i < 8; ++i) mod4[i] = i % 4;
  const std::vector<double> r1{1};
  CHECK(expansion_profile(map_of(c8, c4, mod4), r1).at(1) == 1);

  const std::vector<double> radii{0, 1, 2, 3};
  const auto constant = expansion_profile(map_of(p5, p5, {2, 2, 2, 2, 2}), radii);
  for (auto [r, s] : constant.samples) CHECK(s == 0);

  // Isometric bijection: s(r) = r at attained distances.
  const auto rev = expansion_profile(gen::reversal(p5), radii);
  CHECK(rev.monotone());
  for (auto [r, s] : rev.samples) CHECK(s == r);
}

TEST_CASE("closeness is a pseudometric") {
  auto p5 = p5_from_table();
  const auto id = CoarseMap::identity(p5);
  const auto shift = map_of(p5, p5, {1, 2, 3, 4, 4});
  const auto rev = gen::reversal(p5);
  CHECK(closeness(id, id) == 0);
  CHECK(closeness(id, shift) == 1);
  CHECK(closeness(id, rev) == 4);
  CHECK(closeness(shift, rev) == closeness(rev, shift));
  CHECK(closeness(id, rev) <= closeness(id, shift) + closeness(shift, rev));
  CHECK_THROWS_WITH_AS(closeness(id, CoarseMap::identity(gen::path(5))), doctest::Contains("DomainMismatch"),
                       Error);
}

TEST_CASE("verify_mutual_inverse") {
  auto p5 = p5_from_table();
  const std::vector<double> radii{1, 2};
  auto r = verify_mutual_inverse(CoarseMap::identity(p5), CoarseMap::identity(p5), radii);
  CHECK(r.closeness_fg_id == 0);
  CHECK(r.closeness_gf_id == 0);
  r = verify_mutual_inverse(gen::reversal(p5), gen::reversal(p5), radii);
  CHECK(r.closeness_fg_id == 0);
  CHECK(r.closeness_gf_id == 0);

  auto c8 = gen::cycle(8);
  auto c4 = gen::cycle(4);
  std::vector<Index> mod4(8);
  for (Index i = 0; i < 8; ++i) mod4[i] = i % 4;
  r = verify_mutual_inverse(map_of(c8, c4, mod4), map_of(c4, c8, {0, 1, 2, 3}), radii);
  CHECK(r.closeness_gf_id == 4);
  CHECK(r.closeness_fg_id == 0);
}

TEST_CASE("coarse map inverse and bijectivity witness") {
  auto p5 = p5_from_table();
  const auto f = map_of(p5, p5, {1, 1, 2, 3, 4});
  CHECK_FALSE(f.injective());
  CHECK_THROWS_WITH_AS(f.require_bijective(), doctest::Contains("NotBijective"), Error);
  const auto rev = gen::reversal(p5);
  CHECK(compose(rev, rev.inverse()) == CoarseMap::identity(p5));
}
