#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roe/iso.hpp"
#include "roe/rigidity.hpp"
#include "roe/space.hpp"

namespace roe::io {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kCertificateSchema = "roe-certificate/1";
inline constexpr const char* kGoalCsvSchema = "roe-goal-csv/1";

/// Serializes with every floating-point value printed to 17 significant
/// digits. Object keys come out sorted, so output is byte-stable.
std::string dump(const json& value, int indent = 2);
std::string format_double(double v);

// ---- spaces -------------------------------------------------------------

/// {"label", "points", "edges"} or {"label", "points", "dist"}; exactly one of
/// edges/dist. Point ids may be strings or integers.
SpacePtr space_from_json(const json& doc);
json space_to_json(const FiniteMetricSpace& space);
/// Graph-form JSON (edges between points at distance 1).
json graph_space_to_json(const FiniteMetricSpace& space);

SpacePtr read_space(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

// ---- binary operator matrices --------------------------------------------

/// 8-byte magic "ROEOP\0\0\0", the version byte repeated 8 times, u64 rows,
/// u64 cols (little-endian), then row-major (re, im) float64 pairs.
inline constexpr std::uint8_t kMatrixVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
void write_matrix(const fs::path& path, const Matrix& m);
Matrix read_matrix(const fs::path& path);

/// Operator file pair: `<stem>.bin` and a sidecar naming the space files.
void write_operator(const fs::path& sidecar, const LinearOperator& op, const fs::path& domain_file,
                    const fs::path& codomain_file);
LinearOperator read_operator(const fs::path& sidecar);

// ---- isomorphisms ----------------------------------------------------------

struct IsoProvenance {
  std::string kind = "file";  // "bijection" | "perturbed" | "file"
  std::optional<std::vector<Index>> f;
  std::optional<std::vector<Complex>> phases;
  std::optional<double> radius;
  std::optional<std::uint64_t> seed;
  std::optional<double> max_displacement;
  /// propagation of the perturbing unitary, at zero tolerance 1e-10.
  std::optional<double> propagation;
};

struct IsoFile {
  SpatialIsomorphism iso;
  IsoProvenance provenance;
  fs::path source_file;
  fs::path target_file;
};

/// Writes `<stem>.bin` plus the JSON sidecar at `sidecar`. Space paths are
/// stored relative to the sidecar's directory.
void write_iso(const fs::path& sidecar, const SpatialIsomorphism& iso, const IsoProvenance& prov,
               const fs::path& source_file, const fs::path& target_file);
IsoFile read_iso(const fs::path& sidecar);

/// The bijection recorded in the provenance, when there is one.
std::optional<CoarseMap> truth_from(const IsoFile& file);

// ---- certificates and tables ---------------------------------------------

json map_to_json(const CoarseMap& map);
json params_to_json(const SupportParams& params);
json profile_to_json(const ExpansionProfile& profile);
json certificate_to_json(const BijectionCertificate& cert, const VerificationReport& report);
json failure_to_json(const ExtractionFailed& failure, const FiniteMetricSpace& source,
                     const FiniteMetricSpace& target);

/// One row per (eps, m) with the versioned header comment first.
std::string goal_csv(const std::vector<GoalCell>& cells, const FiniteMetricSpace& source,
                     const FiniteMetricSpace& target);

}  // namespace roe::io
