#include "roe/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace roe::gen {

namespace {

std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw Error(ErrorCode::InvalidParams, std::string(what) + " must be a nonnegative integer");
  }
  return std::size_t(v);
}

}  // namespace

SpacePtr path(std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "path needs at least 1 point");
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return FiniteMetricSpace::from_graph(numbered(n), edges, "path-" + std::to_string(n));
}

SpacePtr cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::InvalidParams, "cycle needs at least 3 points");
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return FiniteMetricSpace::from_graph(numbered(n), edges, "cycle-" + std::to_string(n));
}

SpacePtr grid(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidParams, "grid sides must be >= 1");
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) ids.push_back(std::to_string(r) + "_" + std::to_string(c));
  }
  std::vector<std::pair<Index, Index>> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Index i = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(i, i + 1);
      if (r + 1 < rows) edges.emplace_back(i, i + cols);
    }
  }
  return FiniteMetricSpace::from_graph(std::move(ids), edges,
                                       "grid-" + std::to_string(rows) + "x" + std::to_string(cols));
}

SpacePtr tree(std::size_t arity, std::size_t depth) {
  if (arity < 1) throw Error(ErrorCode::InvalidParams, "tree arity must be >= 1");
  std::size_t n = 1;
  std::size_t level = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    level *= arity;
    n += level;
    if (n > 100000) throw Error(ErrorCode::InvalidParams, "tree too large");
  }
  std::vector<std::pair<Index, Index>> edges;
  for (Index child = 1; child < n; ++child) edges.emplace_back((child - 1) / arity, child);
  return FiniteMetricSpace::from_graph(numbered(n), edges,
                                       "tree-" + std::to_string(arity) + "-" + std::to_string(depth));
}

SpacePtr random_geometric(std::size_t n, double threshold, std::uint64_t seed) {
  if (n < 1 || !(threshold > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "random-geometric needs n >= 1 and threshold > 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {unit(rng), unit(rng)};
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second) <= threshold) {
        edges.emplace_back(i, j);
      }
    }
  }
  try {
    return FiniteMetricSpace::from_graph(numbered(n), edges, "random-geometric-" + std::to_string(n));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DisconnectedGraph) throw;
    throw Error(ErrorCode::InvalidParams,
                "random geometric sample is disconnected; raise the threshold or change the seed");
  }
}

SpacePtr expander_sample(std::size_t n, std::size_t degree, std::uint64_t seed) {
  if (degree < 2 || degree >= n || (n * degree) % 2 != 0) {
    throw Error(ErrorCode::InvalidParams, "need 2 <= degree < n and n*degree even");
  }
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Index> stubs;
    for (Index v = 0; v < n; ++v) stubs.insert(stubs.end(), degree, v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<Index, Index>> seen;
    bool simple = true;
    for (std::size_t k = 0; k < stubs.size() && simple; k += 2) {
      const Index a = std::min(stubs[k], stubs[k + 1]);
      const Index b = std::max(stubs[k], stubs[k + 1]);
      simple = a != b && seen.emplace(a, b).second;
    }
    if (!simple) continue;
    std::vector<std::pair<Index, Index>> edges(seen.begin(), seen.end());
    try {
      return FiniteMetricSpace::from_graph(numbered(n), edges,
                                           "expander-" + std::to_string(n) + "-" + std::to_string(degree));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DisconnectedGraph) throw;
    }
  }
  throw Error(ErrorCode::InvalidParams, "no simple connected regular graph found in 1000 attempts");
}

SpacePtr by_name(const std::string& kind, const std::vector<double>& params,
                 std::optional<std::uint64_t> seed) {
  auto need = [&](std::size_t count) {
    if (params.size() != count) {
      throw Error(ErrorCode::InvalidParams, kind + " takes " + std::to_string(count) + " parameter(s)");
    }
  };
  const std::uint64_t s = seed.value_or(0);
  if (kind == "path") {
    need(1);
    return path(as_count(params[0], "n"));
  }
  if (kind == "cycle") {
    need(1);
    return cycle(as_count(params[0], "n"));
  }
  if (kind == "grid") {
    need(2);
    return grid(as_count(params[0], "rows"), as_count(params[1], "cols"));
  }
  if (kind == "tree") {
    need(2);
    return tree(as_count(params[0], "arity"), as_count(params[1], "depth"));
  }
  if (kind == "random-geometric") {
    need(2);
    return random_geometric(as_count(params[0], "n"), params[1], s);
  }
  if (kind == "expander-sample") {
    need(2);
    return expander_sample(as_count(params[0], "n"), as_count(params[1], "degree"), s);
  }
  throw Error(ErrorCode::InvalidParams, "unknown space kind '" + kind + "'");
}

CoarseMap random_bce(SpacePtr space, double max_displacement, std::uint64_t seed) {
  if (max_displacement < 0.0) throw Error(ErrorCode::InvalidParams, "displacement bound must be >= 0");
  const std::size_t n = space->size();
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> near(n);
  for (Index x = 0; x < n; ++x) near[x] = ball(*space, PointSet{x}, max_displacement);
  // Swap the images of two nearby points whenever both stay within the bound.
  for (std::size_t step = 0; step < 4 * n; ++step) {
    const Index a = Index(rng() % n);
    const Index b = near[a][std::size_t(rng() % near[a].size())];
    if (a == b) continue;
    if (space->within(space->dist(a, perm[b]), max_displacement) &&
        space->within(space->dist(b, perm[a]), max_displacement)) {
      std::swap(perm[a], perm[b]);
    }
  }
  return CoarseMap(space, space, std::move(perm));
}

CoarseMap reversal(SpacePtr space) {
  const std::size_t n = space->size();
  std::vector<Index> table(n);
  for (Index i = 0; i < n; ++i) table[i] = n - 1 - i;
  return CoarseMap(space, space, std::move(table));
}

CoarseMap grid_symmetry(SpacePtr space, std::size_t rows, std::size_t cols, unsigned which) {
  if (space->size() != rows * cols) throw Error(ErrorCode::InvalidParams, "grid shape mismatch");
  const bool square = rows == cols;
  which = square ? which % 8 : (which % 4) * 2;  // non-square: no transposes
  std::vector<Index> table(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t rr = r;
      std::size_t cc = c;
      if (which & 1) std::swap(rr, cc);
      if (which & 2) rr = rows - 1 - rr;
      if (which & 4) cc = cols - 1 - cc;
      table[r * cols + c] = rr * cols + cc;
    }
  }
  return CoarseMap(space, space, std::move(table));
}

std::vector<Complex> random_phases(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Complex> out(n);
  for (auto& z : out) z = std::polar(1.0, angle(rng));
  return out;
}

double max_displacement(const CoarseMap& f) {
  if (f.domain() != f.codomain()) throw Error(ErrorCode::DomainMismatch, "displacement needs a self-map");
  double best = 0.0;
  for (Index x = 0; x < f.table().size(); ++x) best = std::max(best, f.domain()->dist(x, f(x)));
  return best;
}

}  // namespace roe::gen
