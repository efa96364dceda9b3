#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roe/iso.hpp"
#include "roe/space.hpp"

namespace roe {

/// Order in which the matcher scans candidate targets. Any order yields a
/// maximum matching; the order only picks among ties.
enum class TieBreak { Ascending, Descending };

/// Outcome of the Hall test: an injective selection, or a finite set A with
/// |A| > |union of alpha over A|.
struct HallWitness {
  std::optional<std::vector<Index>> matching;
  PointSet deficiency;
  /// |union of alpha over the deficiency set|.
  std::size_t neighbourhood = 0;

  bool ok() const noexcept { return matching.has_value(); }
};

/// Maximum bipartite matching (Hopcroft-Karp). A Hall violator is read off
/// the alternating-path forest of the first unmatched source point.
HallWitness hall_check(const SupportFamily& family, TieBreak order = TieBreak::Ascending);

class HallFailed : public Error {
 public:
  HallFailed(PointSet deficiency, std::size_t neighbourhood, const std::string& detail);
  const PointSet& deficiency() const noexcept { return deficiency_; }
  std::size_t neighbourhood() const noexcept { return neighbourhood_; }

 private:
  PointSet deficiency_;
  std::size_t neighbourhood_;
};

/// Injective f with f(x) in alpha(x). Throws HallFailed.
CoarseMap select_injection(const SupportFamily& family, TieBreak order = TieBreak::Ascending);

/// König's combination of injections f: X -> Y and g: Y -> X into a
/// bijection h with h(x) = f(x) or h(x) = g^{-1}(x). Throws NotInjective.
CoarseMap csb_combine(const CoarseMap& f, const CoarseMap& g);

struct ExtractParams {
  SupportParams::Kind strategy = SupportParams::Kind::Support;
  std::vector<double> eps_grid{0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  std::vector<double> m_grid{0, 1, 2, 3, 5, 8};
  std::vector<double> r_grid{1, 2, 3, 5, 8};
  double threshold = 0.5;
  double delta = 0.5;
  SetSampler sampler;
  std::vector<double> profile_radii{1, 2, 3, 4, 5};
  TieBreak tie_break = TieBreak::Ascending;
};

/// One parameter choice tried by the search and why it was rejected.
struct ExtractionAttempt {
  SupportParams params;
  std::string stage;  // "hall_forward" | "hall_backward" | "ok"
  PointSet witness;
  std::size_t neighbourhood = 0;
};

struct BijectionCertificate {
  CoarseMap h;
  CoarseMap f_raw;
  CoarseMap g_raw;
  SupportParams params;
  double closeness_h_f = 0.0;
  ExpansionProfile expansion_h;
  ExpansionProfile expansion_h_inv;
  double closeness_fg_id = 0.0;
  double closeness_gf_id = 0.0;
  double goal_residual = 0.0;
  double delta = 0.0;
  std::vector<ExtractionAttempt> attempts;
};

class ExtractionFailed : public Error {
 public:
  ExtractionFailed(std::string stage, PointSet witness, std::vector<ExtractionAttempt> attempts,
                   std::vector<EpsilonRow> residuals);

  const std::string& stage() const noexcept { return stage_; }
  const PointSet& witness() const noexcept { return witness_; }
  const std::vector<ExtractionAttempt>& attempts() const noexcept { return attempts_; }
  const std::vector<EpsilonRow>& residuals() const noexcept { return residuals_; }

 private:
  std::string stage_;
  PointSet witness_;
  std::vector<ExtractionAttempt> attempts_;
  std::vector<EpsilonRow> residuals_;
};

/// Builds the forward and backward support families, searches the parameter
/// grid (m ascending, then eps descending; r ascending for the flattened
/// strategy) for the first choice passing Hall both ways, then selects
/// injections and combines them. Throws ExtractionFailed.
BijectionCertificate extract(const SpatialIsomorphism& iso, const ExtractParams& params = {});

/// The support families a certificate's parameters produce.
std::pair<SupportFamily, SupportFamily> families_for(const SpatialIsomorphism& iso,
                                                     const SupportParams& params);

/// Largest GOAL-type residual of the families over the sampled sets, in both
/// directions: ||(1 - chi_{alpha(A)}) Phi(chi_A)|| and the Phi^{-1} analogue.
GoalEstimate family_goal_estimate(const SpatialIsomorphism& iso, const SupportFamily& alpha,
                                  const SupportFamily& beta, const SetSampler& sampler);

struct VerificationReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::optional<double> closeness_to_truth;
  std::size_t sets_checked = 0;
};

/// Re-checks every certificate field against the isomorphism.
VerificationReport verify_certificate(const BijectionCertificate& cert, const SpatialIsomorphism& iso,
                                      const std::optional<CoarseMap>& f_true = std::nullopt,
                                      const SetSampler& sampler = {});

/// Throws CertificateInvalid carrying the first failure.
void require_valid(const VerificationReport& report);

}  // namespace roe
