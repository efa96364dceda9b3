#include "roe/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "roe/functions.hpp"
#include "roe/generators.hpp"
#include "roe/iso.hpp"
#include "roe/operator.hpp"
#include "roe/rigidity.hpp"

namespace roe {

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

Matrix random_banded(const FiniteMetricSpace& space, double width, std::mt19937_64& rng) {
  const auto n = Eigen::Index(space.size());
  Matrix m = random_matrix(n, rng);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (space.dist(Index(i), Index(j)) > width) m(i, j) = 0.0;
    }
  }
  return m;
}

Outcome check_space() {
  Outcome o;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto space = gen::random_geometric(40, 0.35, seed);
    const auto& X = *space;
    for (Index x = 0; x < X.size(); ++x) {
      for (Index y = 0; y < X.size(); ++y) {
        o.expect(X.dist(x, y) == X.dist(y, x), "graph metric not symmetric");
        for (Index z = 0; z < X.size(); ++z) {
          o.expect(X.dist(x, y) <= X.dist(x, z) + X.dist(z, y), "graph metric violates triangle");
        }
      }
    }
    for (double r = 0; r < 5; ++r) {
      o.expect(growth(X, r) <= growth(X, r + 1), "growth not monotone");
      const auto small = ball(X, PointSet{0, 5}, r);
      const auto big = ball(X, PointSet{0, 5}, r + 1);
      o.expect(std::includes(big.begin(), big.end(), small.begin(), small.end()), "balls not nested");
    }
  }
  return o;
}

Outcome check_maps() {
  Outcome o;
  const auto grid = gen::grid(6, 6);
  const std::vector<double> radii{0, 1, 2, 3, 4, 5};
  for (unsigned k = 0; k < 8; ++k) {
    const auto f = gen::grid_symmetry(grid, 6, 6, k);
    const auto p = expansion_profile(f, radii);
    o.expect(p.monotone(), "expansion profile not monotone");
    for (const auto& [r, s] : p.samples) o.expect(s == r, "isometry profile differs from r");
  }
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto random_map = [&] {
      std::vector<Index> t(grid->size());
      for (auto& v : t) v = Index(rng() % grid->size());
      return CoarseMap(grid, grid, t);
    };
    const auto f = random_map();
    const auto g = random_map();
    const auto h = random_map();
    o.expect(closeness(f, f) == 0.0, "closeness(f,f) != 0");
    o.expect(closeness(f, g) == closeness(g, f), "closeness not symmetric");
    o.expect(closeness(f, h) <= closeness(f, g) + closeness(g, h), "closeness triangle fails");
    o.expect(expansion_profile(f, radii).monotone(), "random map profile not monotone");
  }
  return o;
}

Outcome check_operators() {
  Outcome o;
  std::mt19937_64 rng(21);
  const auto space = gen::path(20);
  const std::vector<double> radii{0, 1, 2, 3, 4, 5, 6, 8, 12, 20};
  for (int trial = 0; trial < 20; ++trial) {
    const LinearOperator a(space, random_banded(*space, double(trial % 4), rng));
    const LinearOperator b(space, random_banded(*space, double(trial % 3), rng));
    const auto e = conditional_expectation(a);
    o.expect((conditional_expectation(e).matrix() - e.matrix()).norm() <= 1e-12, "E not idempotent");
    o.expect(op_norm(e) <= op_norm(a) + 1e-9, "E not contractive");
    Matrix d1 = Matrix::Zero(20, 20);
    Matrix d2 = Matrix::Zero(20, 20);
    for (int i = 0; i < 20; ++i) {
      d1(i, i) = Complex(double(rng() % 7) - 3.0, 1.0);
      d2(i, i) = Complex(1.0, double(rng() % 5) - 2.0);
    }
    const LinearOperator D1(space, d1);
    const LinearOperator D2(space, d2);
    const auto lhs = conditional_expectation(D1 * a * D2).matrix();
    const auto rhs = (D1 * conditional_expectation(a) * D2).matrix();
    o.expect((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9, "E not a bimodule map");
    o.expect(propagation(a * b) <= propagation(a) + propagation(b), "propagation not subadditive");

    const auto profile = quasi_local_profile(a, radii);
    for (std::size_t k = 1; k < profile.samples.size(); ++k) {
      o.expect(profile.samples[k].second <= profile.samples[k - 1].second + 1e-9,
               "quasi-local profile increases");
    }
    for (const auto& [r, v] : profile.samples) {
      if (r > propagation(a)) o.expect(v == 0.0, "profile nonzero beyond propagation");
    }
    // Compression bound on a few separated pairs.
    for (Index s = 0; s + 6 < 20; s += 5) {
      const PointSet A{s, s + 1};
      const PointSet B{s + 5, s + 6};
      const double r = space->set_distance(A, B);
      o.expect(block_norm(a, A, B) <= quasi_local_profile(a, std::vector<double>{r}).samples[0].second + 1e-9,
               "block norm exceeds band bound");
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_matrix(20, rng);
    const double oracle = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
    o.expect(std::abs(op_norm(m) - oracle) <= 1e-8 * oracle, "op_norm disagrees with SVD");
  }
  return o;
}

Outcome check_functions() {
  Outcome o;
  const auto space = gen::path(60);
  for (double r : {1.0, 2.0, 3.5, 7.0}) {
    const PointSet A{10, 30};
    const auto g = flattened_indicator(space, A, r);
    for (Index a : A) o.expect(g(a) == 1.0, "g_{A,r} is not 1 on A");
    for (double rp = 0.5; rp <= r; rp += 0.5) {
      o.expect(so_variation(g, rp) <= rp / r + 1e-12, "flattened indicator Lipschitz bound fails");
      o.expect(so_variation(g, rp, PointSet{10}) <= so_variation(g, rp), "variation not antitone in F");
      o.expect(so_variation(g, rp) <= so_variation(g, rp + 0.5), "variation not monotone in r");
    }
  }
  const auto long_path = gen::path(200);
  const auto family = separated_family(*long_path, 3);
  o.expect(family.sets.size() == 3, "separated family exhausted on P200");
  if (family.sets.size() == 3) {
    const auto gm = sum_flattened(long_path, family.sets, {1.0, 2.0, 3.0});
    for (std::size_t n = 2; n <= 3; ++n) {
      PointSet centres;
      for (std::size_t k = 0; k < n; ++k) centres = set_union(centres, family.sets[k]);
      const auto F = ball(*long_path, centres, double(n));
      for (std::size_t r = 1; r < n; ++r) {
        o.expect(so_variation(gm, double(r), F) <= double(r) / double(n) + 1e-12, "variation bound fails");
      }
    }
  }
  return o;
}

Outcome check_iso(const SelftestFaults& faults) {
  Outcome o;
  const auto space = gen::grid(5, 5);
  if (faults.break_unitarity) {
    try {
      SpatialIsomorphism broken(space, space, Matrix::Identity(25, 25) * Complex(1.0 + 1e-6));
      o.expect(false, "non-unitary matrix accepted");
    } catch (const Error& e) {
      o.expect(false, std::string("isomorphism construction failed: ") + e.what());
    }
    return o;
  }
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto w = random_local_unitary(space, double(seed % 3), seed);
    o.expect(unitarity_defect(w.matrix()) <= 1e-10, "local unitary not unitary");
    o.expect(propagation(w, 1e-10) <= double(seed % 3), "local unitary exceeds radius");
    const auto f = gen::random_bce(space, 2, seed);
    const auto iso = perturb(from_bijection(f), w);
    const LinearOperator a(space, random_banded(*space, 2, rng));
    o.expect(std::abs(op_norm(iso.apply(a)) - op_norm(a)) <= 1e-8, "Ad(u) not isometric");
    const PointSet A = ball(*space, PointSet{Index(seed)}, 1);
    o.expect(numerical_rank(iso.apply(indicator(space, A))) == A.size(), "rank not preserved");
    const auto inv = iso.inverse();
    for (Index x = 0; x < space->size(); ++x) {
      for (Index y = 0; y < space->size(); ++y) {
        o.expect(std::abs(iso.column_weight(x, y) - inv.column_weight(y, x)) <= 1e-12,
                 "support weights not symmetric");
      }
      const auto loose = support_set(iso, x, 0.1);
      const auto tight = support_set(iso, x, 0.4);
      o.expect(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()),
               "support sets not monotone in eps");
    }
    const auto exact = from_bijection(f);
    for (Index x = 0; x < space->size(); ++x) {
      for (Index y = 0; y < space->size(); ++y) {
        const bool forward = !support_set(exact, x, 0.5).empty() && support_set(exact, x, 0.5)[0] == y;
        const auto back = support_set(exact.inverse(), y, 0.5);
        o.expect(forward == (!back.empty() && back[0] == x), "exact support symmetry fails");
      }
    }
  }
  return o;
}

Outcome check_rigidity(const SelftestFaults& faults) {
  Outcome o;
  std::mt19937_64 rng(41);
  // Hall against subset enumeration.
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const auto X = gen::path(n);
    SupportFamily fam{X, X, std::vector<PointSet>(n), {}};
    for (auto& s : fam.sets) {
      for (Index y = 0; y < n; ++y) {
        if (rng() % 3 == 0) s.push_back(y);
      }
    }
    bool hall = true;
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask) {
      PointSet A;
      for (Index i = 0; i < n; ++i) {
        if (mask >> i & 1) A.push_back(i);
      }
      if (A.size() > fam.union_of(A).size()) hall = false;
    }
    const auto w = hall_check(fam);
    o.expect(w.ok() == hall, "hall_check disagrees with enumeration");
    if (!w.ok()) o.expect(w.deficiency.size() > fam.union_of(w.deficiency).size(), "bad deficiency");
  }
  // CSB dichotomy.
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    const auto X = gen::path(n);
    std::vector<Index> pf(n), pg(n);
    for (Index i = 0; i < n; ++i) pf[i] = pg[i] = i;
    std::shuffle(pf.begin(), pf.end(), rng);
    std::shuffle(pg.begin(), pg.end(), rng);
    const CoarseMap f(X, X, pf);
    const CoarseMap g(X, X, pg);
    const auto h = csb_combine(f, g);
    o.expect(h.bijective(), "csb output not bijective");
    const auto ginv = g.inverse();
    for (Index x = 0; x < n; ++x) o.expect(h(x) == f(x) || h(x) == ginv(x), "csb dichotomy fails");
  }
  // Round trip, Hall-from-GOAL and tie-break stability.
  const auto grid = gen::grid(4, 4);
  const TieBreak primary = faults.flip_tie_break ? TieBreak::Descending : TieBreak::Ascending;
  const TieBreak other = faults.flip_tie_break ? TieBreak::Ascending : TieBreak::Descending;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto f = gen::random_bce(grid, 2, seed);
    ExtractParams params;
    params.eps_grid = {0.5};
    params.m_grid = {0};
    params.tie_break = primary;
    const auto cert = extract(from_bijection(f), params);
    o.expect(cert.h == f && cert.goal_residual == 0.0, "round trip not exact");

    const auto iso = perturb(from_bijection(f), random_local_unitary(grid, 1, seed + 100));
    ExtractParams search;
    search.tie_break = primary;
    try {
      const auto c1 = extract(iso, search);
      search.tie_break = other;
      const auto c2 = extract(iso, search);
      const auto [alpha, beta] = families_for(iso, c1.params);
      const double spread = std::max(alpha.max_diameter(), beta.max_diameter());
      o.expect(closeness(c1.h, c2.h) <= 2.0 * spread, "tie-break changes h beyond 2*diam(alpha)");
    } catch (const ExtractionFailed&) {
    }

    const auto small = gen::path(10);
    const auto small_iso = perturb(from_bijection(gen::random_bce(small, 1, seed)),
                                   random_local_unitary(small, 1, seed + 7));
    for (double eps : {0.5, 0.3}) {
      for (double m : {0.0, 1.0}) {
        SetSampler sampler;
        sampler.seed = seed;
        if (goal_estimate(small_iso, eps, m, sampler).residual < 1.0) {
          const auto fam = support_family(small_iso, eps, m);
          for (const auto& A : sample_sets(*small, sampler)) {
            o.expect(A.size() <= fam.union_of(A).size(), "Hall inequality fails under GOAL < 1");
          }
        }
      }
    }
  }
  return o;
}

}  // namespace

std::vector<SelftestResult> run_selftest(const SelftestFaults& faults) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"space: metric axioms, nested balls, monotone growth", check_space},
      {"space: expansion profiles and closeness pseudometric", check_maps},
      {"operator: expectation, propagation, quasi-locality, op_norm", check_operators},
      {"functions: flattened indicators and variation bounds", check_functions},
      {"iso: unitarity, isometry, rank, support symmetry", [&] { return check_iso(faults); }},
      {"rigidity: Hall oracle, CSB, round trip, stability", [&] { return check_rigidity(faults); }},
  };
  std::vector<SelftestResult> results;
  for (const auto& [name, fn] : checks) {
    SelftestResult r{name, false, {}};
    try {
      const auto outcome = fn();
      r.passed = outcome.ok;
      r.detail = outcome.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

int print_selftest(const std::vector<SelftestResult>& results, std::ostream& out) {
  int failures = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name;
    if (!r.passed) {
      ++failures;
      out << "  -- " << r.detail;
    }
    out << '\n';
  }
  out << (results.size() - std::size_t(failures)) << "/" << results.size() << " checks passed\n";
  return failures;
}

}  // namespace roe
