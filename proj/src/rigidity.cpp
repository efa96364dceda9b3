#include "roe/rigidity.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "roe/parallel.hpp"

namespace roe {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// Hopcroft-Karp on the bipartite graph source -> family.sets[source].
class Matcher {
 public:
  Matcher(const SupportFamily& family, TieBreak order)
      : n_left_(family.sets.size()), n_right_(family.target->size()) {
    adj_.resize(n_left_);
    for (Index x = 0; x < n_left_; ++x) {
      adj_[x] = family.sets[x];
      if (order == TieBreak::Descending) std::reverse(adj_[x].begin(), adj_[x].end());
    }
    match_left_.assign(n_left_, kNone);
    match_right_.assign(n_right_, kNone);
    layer_.assign(n_left_, 0);
  }

  void run() {
    while (bfs()) {
      for (Index x = 0; x < n_left_; ++x) {
        if (match_left_[x] == kNone) dfs(x);
      }
    }
  }

  const std::vector<std::size_t>& left() const { return match_left_; }
  const std::vector<std::size_t>& right() const { return match_right_; }
  const std::vector<std::vector<Index>>& adj() const { return adj_; }

 private:
  std::size_t n_left_;
  std::size_t n_right_;
  std::vector<std::vector<Index>> adj_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::vector<std::size_t> layer_;

  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::deque<Index> queue;
    for (Index x = 0; x < n_left_; ++x) {
      if (match_left_[x] == kNone) {
        layer_[x] = 0;
        queue.push_back(x);
      } else {
        layer_[x] = kInf;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      const Index x = queue.front();
      queue.pop_front();
      for (Index y : adj_[x]) {
        const std::size_t next = match_right_[y];
        if (next == kNone) {
          found = true;
        } else if (layer_[next] == kInf) {
          layer_[next] = layer_[x] + 1;
          queue.push_back(next);
        }
      }
    }
    return found;
  }

  bool dfs(Index x) {
    for (Index y : adj_[x]) {
      const std::size_t next = match_right_[y];
      if (next == kNone || (layer_[next] == layer_[x] + 1 && dfs(next))) {
        match_left_[x] = y;
        match_right_[y] = x;
        return true;
      }
    }
    layer_[x] = kInf;
    return false;
  }
};

std::string describe(const FiniteMetricSpace& space, const PointSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ",";
    out += space.id(set[i]);
  }
  return out + "}";
}

}  // namespace

HallWitness hall_check(const SupportFamily& family, TieBreak order) {
  Matcher matcher(family, order);
  matcher.run();
  const auto& left = matcher.left();
  const auto unmatched = std::find(left.begin(), left.end(), kNone);
  HallWitness witness;
  if (unmatched == left.end()) {
    witness.matching = std::vector<Index>(left.begin(), left.end());
    return witness;
  }
  // Every target reachable by an alternating path from an unmatched source is
  // matched (the matching is maximum), so the reached sources outnumber their
  // neighbourhood by exactly one.
  const Index root = Index(unmatched - left.begin());
  std::vector<char> seen_left(left.size(), 0);
  std::vector<char> seen_right(family.target->size(), 0);
  std::deque<Index> queue{root};
  seen_left[root] = 1;
  while (!queue.empty()) {
    const Index x = queue.front();
    queue.pop_front();
    for (Index y : matcher.adj()[x]) {
      if (seen_right[y]) continue;
      seen_right[y] = 1;
      const std::size_t next = matcher.right()[y];
      if (next != kNone && !seen_left[next]) {
        seen_left[next] = 1;
        queue.push_back(next);
      }
    }
  }
  for (Index x = 0; x < left.size(); ++x) {
    if (seen_left[x]) witness.deficiency.push_back(x);
  }
  witness.neighbourhood = std::size_t(std::count(seen_right.begin(), seen_right.end(), 1));
  return witness;
}

HallFailed::HallFailed(PointSet deficiency, std::size_t neighbourhood, const std::string& detail)
    : Error(ErrorCode::HallFailed, detail),
      deficiency_(std::move(deficiency)),
      neighbourhood_(neighbourhood) {}

CoarseMap select_injection(const SupportFamily& family, TieBreak order) {
  auto witness = hall_check(family, order);
  if (!witness.ok()) {
    const std::string detail = "|A| = " + std::to_string(witness.deficiency.size()) +
                               " > |alpha(A)| = " + std::to_string(witness.neighbourhood) +
                               " for A = " + describe(*family.source, witness.deficiency);
    throw HallFailed(std::move(witness.deficiency), witness.neighbourhood, detail);
  }
  return CoarseMap(family.source, family.target, std::move(*witness.matching));
}

CoarseMap csb_combine(const CoarseMap& f, const CoarseMap& g) {
  if (f.domain() != g.codomain() || f.codomain() != g.domain()) {
    throw Error(ErrorCode::DomainMismatch, "csb_combine needs f: X -> Y and g: Y -> X");
  }
  const std::size_t nx = f.domain()->size();
  const std::size_t ny = f.codomain()->size();
  std::vector<std::size_t> f_inv(ny, kNone);
  std::vector<std::size_t> g_inv(nx, kNone);
  for (Index x = 0; x < nx; ++x) {
    if (f_inv[f(x)] != kNone) {
      throw Error(ErrorCode::NotInjective, "f maps " + f.domain()->id(f_inv[f(x)]) + " and " +
                                               f.domain()->id(x) + " to the same point");
    }
    f_inv[f(x)] = x;
  }
  for (Index y = 0; y < ny; ++y) {
    if (g_inv[g(y)] != kNone) {
      throw Error(ErrorCode::NotInjective, "g maps " + g.domain()->id(g_inv[g(y)]) + " and " +
                                               g.domain()->id(y) + " to the same point");
    }
    g_inv[g(y)] = y;
  }

  // Trace x <- g <- y <- f <- x' ... backwards. A chain that dies in X \ Im(g)
  // (or closes into a cycle) takes f; one that dies in Y \ Im(f) takes g^{-1}.
  std::vector<Index> h(nx);
  for (Index start = 0; start < nx; ++start) {
    bool use_f = true;
    Index x = start;
    for (std::size_t steps = 0; steps <= nx + ny; ++steps) {
      const std::size_t y = g_inv[x];
      if (y == kNone) break;  // X-stopper
      const std::size_t prev = f_inv[y];
      if (prev == kNone) {  // Y-stopper
        use_f = false;
        break;
      }
      if (prev == start) break;  // cycle
      x = prev;
    }
    h[start] = use_f ? f(start) : g_inv[start];
  }
  CoarseMap out(f.domain(), f.codomain(), std::move(h));
  out.require_bijective();
  return out;
}

ExtractionFailed::ExtractionFailed(std::string stage, PointSet witness,
                                   std::vector<ExtractionAttempt> attempts,
                                   std::vector<EpsilonRow> residuals)
    : Error(ErrorCode::ExtractionFailed,
            "no grid parameters pass the Hall test (last failure at " + stage + ")"),
      stage_(std::move(stage)),
      witness_(std::move(witness)),
      attempts_(std::move(attempts)),
      residuals_(std::move(residuals)) {}

std::pair<SupportFamily, SupportFamily> families_for(const SpatialIsomorphism& iso,
                                                     const SupportParams& params) {
  const auto inv = iso.inverse();
  if (params.kind == SupportParams::Kind::Support) {
    return {support_family(iso, params.eps, params.m), support_family(inv, params.eps, params.m)};
  }
  return {support_family_flattened(iso, params.r, params.threshold),
          support_family_flattened(inv, params.r, params.threshold)};
}

GoalEstimate family_goal_estimate(const SpatialIsomorphism& iso, const SupportFamily& alpha,
                                  const SupportFamily& beta, const SetSampler& sampler) {
  const auto inv = iso.inverse();
  auto scan = [](const SpatialIsomorphism& phi, const SupportFamily& family,
                 const std::vector<PointSet>& sets, double& worst, PointSet& witness) {
    std::vector<double> values(sets.size(), 0.0);
    parallel_for(sets.size(), [&](std::size_t k) {
      values[k] = goal_residual(phi, sets[k], family.union_of(sets[k]));
    });
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (values[k] > worst) {
        worst = values[k];
        witness = sets[k];
      }
    }
  };
  SetSampler backward_sampler = sampler;
  backward_sampler.seed = sampler.seed ^ 0x9e3779b97f4a7c15ULL;
  GoalEstimate est;
  PointSet fwd_witness;
  PointSet bwd_witness;
  scan(iso, alpha, sample_sets(*iso.source(), sampler), est.forward, fwd_witness);
  scan(inv, beta, sample_sets(*iso.target(), backward_sampler), est.backward, bwd_witness);
  if (est.backward > est.forward) {
    est.residual = est.backward;
    est.direction = GoalEstimate::Direction::Backward;
    est.witness = std::move(bwd_witness);
  } else {
    est.residual = est.forward;
    est.witness = std::move(fwd_witness);
  }
  return est;
}

BijectionCertificate extract(const SpatialIsomorphism& iso, const ExtractParams& params) {
  std::vector<SupportParams> grid;
  if (params.strategy == SupportParams::Kind::Support) {
    auto m_grid = params.m_grid;
    auto eps_grid = params.eps_grid;
    std::sort(m_grid.begin(), m_grid.end());
    std::sort(eps_grid.rbegin(), eps_grid.rend());
    for (double m : m_grid) {
      for (double eps : eps_grid) {
        SupportParams p;
        p.kind = SupportParams::Kind::Support;
        p.eps = eps;
        p.m = m;
        grid.push_back(p);
      }
    }
  } else {
    auto r_grid = params.r_grid;
    std::sort(r_grid.begin(), r_grid.end());
    for (double r : r_grid) {
      SupportParams p;
      p.kind = SupportParams::Kind::Flattened;
      p.r = r;
      p.threshold = params.threshold;
      grid.push_back(p);
    }
  }
  if (grid.empty()) throw Error(ErrorCode::InvalidParams, "empty parameter grid");

  std::vector<ExtractionAttempt> attempts;
  for (const auto& p : grid) {
    auto [alpha, beta] = families_for(iso, p);
    auto fwd = hall_check(alpha, params.tie_break);
    if (!fwd.ok()) {
      attempts.push_back({p, "hall_forward", fwd.deficiency, fwd.neighbourhood});
      continue;
    }
    auto bwd = hall_check(beta, params.tie_break);
    if (!bwd.ok()) {
      attempts.push_back({p, "hall_backward", bwd.deficiency, bwd.neighbourhood});
      continue;
    }
    attempts.push_back({p, "ok", {}, 0});

    CoarseMap f_raw(iso.source(), iso.target(), std::move(*fwd.matching));
    CoarseMap g_raw(iso.target(), iso.source(), std::move(*bwd.matching));
    CoarseMap h = csb_combine(f_raw, g_raw);
    const auto mutual = verify_mutual_inverse(f_raw, g_raw, params.profile_radii);
    const double closeness_h_f = closeness(h, f_raw);
    auto expansion_h = expansion_profile(h, params.profile_radii);
    auto expansion_h_inv = expansion_profile(h.inverse(), params.profile_radii);
    const double residual = p.kind == SupportParams::Kind::Support
                                ? goal_estimate(iso, p.eps, p.m, params.sampler).residual
                                : family_goal_estimate(iso, alpha, beta, params.sampler).residual;
    return BijectionCertificate{std::move(h),
                                std::move(f_raw),
                                std::move(g_raw),
                                p,
                                closeness_h_f,
                                std::move(expansion_h),
                                std::move(expansion_h_inv),
                                mutual.closeness_fg_id,
                                mutual.closeness_gf_id,
                                residual,
                                params.delta,
                                std::move(attempts)};
  }

  std::vector<EpsilonRow> residuals;
  if (params.strategy == SupportParams::Kind::Support) {
    auto eps_grid = params.eps_grid;
    std::sort(eps_grid.rbegin(), eps_grid.rend());
    try {
      residuals = epsilon_for_delta(iso, params.delta, eps_grid).table;
    } catch (const NoFeasibleEps& e) {
      residuals = e.table();
    }
  }
  const auto& last = attempts.back();
  throw ExtractionFailed(last.stage, last.witness, std::move(attempts), std::move(residuals));
}

VerificationReport verify_certificate(const BijectionCertificate& cert, const SpatialIsomorphism& iso,
                                      const std::optional<CoarseMap>& f_true,
                                      const SetSampler& sampler) {
  VerificationReport report;
  auto fail = [&](const std::string& field, const std::string& expected, const std::string& found) {
    report.ok = false;
    report.failures.push_back(field + ": expected " + expected + ", found " + found);
  };
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };

  if (cert.h.domain() != iso.source() || cert.h.codomain() != iso.target()) {
    fail("h", "a map from the isomorphism's source to its target", "different spaces");
    return report;
  }
  if (!cert.h.bijective()) fail("h", "bijection", "non-bijective map");
  if (!cert.f_raw.injective()) fail("f_raw", "injective", "collision");
  if (!cert.g_raw.injective()) fail("g_raw", "injective", "collision");

  const double c = closeness(cert.h, cert.f_raw);
  if (c != cert.closeness_h_f) fail("closeness_h_f", num(c), num(cert.closeness_h_f));

  const auto [alpha, beta] = families_for(iso, cert.params);
  auto contains = [](const PointSet& s, Index v) { return std::binary_search(s.begin(), s.end(), v); };
  for (Index x = 0; x < alpha.sets.size(); ++x) {
    if (!contains(alpha.sets[x], cert.f_raw(x))) {
      fail("f_raw", "f_raw(" + iso.source()->id(x) + ") in alpha", iso.target()->id(cert.f_raw(x)));
    }
    const Index y = cert.h(x);
    if (!contains(alpha.sets[x], y) && !contains(beta.sets[y], x)) {
      fail("h", "h(" + iso.source()->id(x) + ") in alpha(x) or x in beta(h(x))",
           iso.target()->id(y));
    }
  }
  for (Index y = 0; y < beta.sets.size(); ++y) {
    if (!contains(beta.sets[y], cert.g_raw(y))) {
      fail("g_raw", "g_raw(" + iso.target()->id(y) + ") in beta", iso.source()->id(cert.g_raw(y)));
    }
  }

  if (report.ok) {
    std::vector<double> radii;
    for (const auto& [r, s] : cert.expansion_h.samples) radii.push_back(r);
    const auto eh = expansion_profile(cert.h, radii);
    const auto ehi = expansion_profile(cert.h.inverse(), radii);
    if (eh.samples != cert.expansion_h.samples) fail("expansion_h", "recomputed profile", "mismatch");
    if (ehi.samples != cert.expansion_h_inv.samples) {
      fail("expansion_h_inv", "recomputed profile", "mismatch");
    }
  }

  // |A| <= |alpha(A)| on every sampled set, both directions, by counting.
  SetSampler backward_sampler = sampler;
  backward_sampler.seed = sampler.seed ^ 0x9e3779b97f4a7c15ULL;
  for (const auto& a : sample_sets(*iso.source(), sampler)) {
    ++report.sets_checked;
    const auto image = alpha.union_of(a);
    if (a.size() > image.size()) {
      fail("hall_forward", "|A| <= " + std::to_string(image.size()), std::to_string(a.size()));
      break;
    }
  }
  for (const auto& b : sample_sets(*iso.target(), backward_sampler)) {
    ++report.sets_checked;
    const auto image = beta.union_of(b);
    if (b.size() > image.size()) {
      fail("hall_backward", "|B| <= " + std::to_string(image.size()), std::to_string(b.size()));
      break;
    }
  }

  if (f_true) report.closeness_to_truth = closeness(cert.h, *f_true);
  return report;
}

void require_valid(const VerificationReport& report) {
  if (!report.ok) throw Error(ErrorCode::CertificateInvalid, report.failures.front());
}

}  // namespace roe
