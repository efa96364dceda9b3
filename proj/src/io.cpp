#include "roe/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace roe::io {

namespace {

constexpr std::array<char, 8> kMagic{'R', 'O', 'E', 'O', 'P', '\0', '\0', '\0'};

void dump_into(std::string& out, const json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(std::size_t(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(out, item, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get_le(std::istream& in, const char* what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::FormatError, std::string("truncated matrix file while reading ") + what);
  return value;
}

fs::path resolve(const fs::path& base_file, const std::string& ref) {
  fs::path p(ref);
  if (p.is_absolute()) return p;
  return base_file.parent_path() / p;
}

std::string relative_to(const fs::path& target, const fs::path& base_file) {
  const auto base_dir = fs::absolute(base_file).parent_path();
  return fs::absolute(target).lexically_normal().lexically_relative(base_dir).generic_string();
}

std::string point_id(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorCode::FormatError, "point ids must be strings or integers");
}

json ids_json(const FiniteMetricSpace& space, const PointSet& set) {
  json arr = json::array();
  for (Index i : set) arr.push_back(space.id(i));
  return arr;
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const json& value, int indent) {
  std::string out;
  dump_into(out, value, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

SpacePtr space_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("points")) {
    throw Error(ErrorCode::FormatError, "space JSON needs a \"points\" array");
  }
  const bool has_edges = doc.contains("edges");
  const bool has_dist = doc.contains("dist");
  if (has_edges == has_dist) {
    throw Error(ErrorCode::FormatError, "space JSON needs exactly one of \"edges\" or \"dist\"");
  }
  std::vector<std::string> ids;
  for (const auto& p : doc.at("points")) ids.push_back(point_id(p));
  const std::string label = doc.value("label", std::string{});
  if (has_edges) {
    std::unordered_map<std::string, Index> lookup;
    for (Index i = 0; i < ids.size(); ++i) lookup.emplace(ids[i], i);
    std::vector<std::pair<Index, Index>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::FormatError, "edges are [id, id] pairs");
      const auto a = lookup.find(point_id(e[0]));
      const auto b = lookup.find(point_id(e[1]));
      if (a == lookup.end() || b == lookup.end()) {
        throw Error(ErrorCode::UnknownPoint, "edge references an unknown point");
      }
      edges.emplace_back(a->second, b->second);
    }
    return FiniteMetricSpace::from_graph(std::move(ids), edges, label);
  }
  const auto& rows = doc.at("dist");
  const std::size_t n = ids.size();
  if (!rows.is_array() || rows.size() != n) {
    throw MetricViolation("shape", {}, "dist must have one row per point");
  }
  std::vector<double> table;
  table.reserve(n * n);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != n) {
      throw MetricViolation("shape", {}, "dist rows must have one entry per point");
    }
    for (const auto& v : row) table.push_back(v.get<double>());
  }
  return FiniteMetricSpace::build(std::move(ids), std::move(table), label);
}

json space_to_json(const FiniteMetricSpace& space) {
  json doc;
  doc["label"] = space.label();
  doc["points"] = space.ids();
  json rows = json::array();
  for (Index x = 0; x < space.size(); ++x) {
    json row = json::array();
    for (double d : space.row(x)) row.push_back(d);
    rows.push_back(std::move(row));
  }
  doc["dist"] = std::move(rows);
  return doc;
}

json graph_space_to_json(const FiniteMetricSpace& space) {
  json doc;
  doc["label"] = space.label();
  doc["points"] = space.ids();
  json edges = json::array();
  for (Index x = 0; x < space.size(); ++x) {
    for (Index y = x + 1; y < space.size(); ++y) {
      if (space.dist(x, y) == 1.0) edges.push_back(json::array({space.id(x), space.id(y)}));
    }
  }
  doc["edges"] = std::move(edges);
  return doc;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FormatError, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FormatError, "cannot write " + path.string());
  out << text;
}

SpacePtr read_space(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
  try {
    return space_from_json(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out.write(kMagic.data(), kMagic.size());
  for (int i = 0; i < 8; ++i) out.put(char(kMatrixVersion));
  put_le<std::uint64_t>(out, std::uint64_t(m.rows()));
  put_le<std::uint64_t>(out, std::uint64_t(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_le<double>(out, m(i, j).real());
      put_le<double>(out, m(i, j).imag());
    }
  }
}

Matrix read_matrix(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorCode::FormatError, "bad matrix magic");
  std::array<char, 8> version{};
  in.read(version.data(), version.size());
  if (!in) throw Error(ErrorCode::FormatError, "truncated matrix header");
  for (char v : version) {
    if (std::uint8_t(v) != kMatrixVersion) {
      throw Error(ErrorCode::FormatError, "unsupported matrix version " + std::to_string(std::uint8_t(v)));
    }
  }
  const auto rows = get_le<std::uint64_t>(in, "rows");
  const auto cols = get_le<std::uint64_t>(in, "cols");
  constexpr std::uint64_t kMaxDim = 1u << 20;
  if (rows > kMaxDim || cols > kMaxDim) throw Error(ErrorCode::FormatError, "implausible matrix shape");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = get_le<double>(in, "entries");
      const double im = get_le<double>(in, "entries");
      m(i, j) = Complex(re, im);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::FormatError, "trailing bytes after matrix entries");
  }
  if (!m.allFinite()) throw Error(ErrorCode::FormatError, "non-finite matrix entries");
  return m;
}

void write_matrix(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FormatError, "cannot write " + path.string());
  write_matrix(out, m);
}

Matrix read_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FormatError, "cannot open " + path.string());
  try {
    return read_matrix(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

namespace {

json read_sidecar(const fs::path& sidecar) {
  try {
    return json::parse(read_text(sidecar));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, sidecar.string() + ": " + e.what());
  }
}

fs::path matrix_path_for(const fs::path& sidecar) {
  fs::path bin = sidecar;
  bin.replace_extension(".bin");
  return bin;
}

}  // namespace

void write_operator(const fs::path& sidecar, const LinearOperator& op, const fs::path& domain_file,
                    const fs::path& codomain_file) {
  const auto bin = matrix_path_for(sidecar);
  write_matrix(bin, op.matrix());
  json doc;
  doc["matrix"] = bin.filename().generic_string();
  doc["domain_space"] = relative_to(domain_file, sidecar);
  doc["codomain_space"] = relative_to(codomain_file, sidecar);
  write_text(sidecar, dump(doc));
}

LinearOperator read_operator(const fs::path& sidecar) {
  const json doc = read_sidecar(sidecar);
  try {
    const auto domain_file = resolve(sidecar, doc.at("domain_space").get<std::string>());
    const auto codomain_file = resolve(sidecar, doc.at("codomain_space").get<std::string>());
    auto domain = read_space(domain_file);
    auto codomain = fs::equivalent(domain_file, codomain_file) ? domain : read_space(codomain_file);
    auto m = read_matrix(resolve(sidecar, doc.at("matrix").get<std::string>()));
    return LinearOperator(std::move(domain), std::move(codomain), std::move(m));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, sidecar.string() + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::FormatError, e.what());
  }
}

void write_iso(const fs::path& sidecar, const SpatialIsomorphism& iso, const IsoProvenance& prov,
               const fs::path& source_file, const fs::path& target_file) {
  const auto bin = matrix_path_for(sidecar);
  write_matrix(bin, iso.unitary());
  json p;
  p["kind"] = prov.kind;
  const auto& X = *iso.source();
  const auto& Y = *iso.target();
  if (prov.f) {
    json f = json::object();
    for (Index x = 0; x < prov.f->size(); ++x) f[X.id(x)] = Y.id((*prov.f)[x]);
    p["f"] = std::move(f);
  }
  if (prov.phases) {
    json ph = json::object();
    for (Index x = 0; x < prov.phases->size(); ++x) {
      ph[X.id(x)] = json::array({(*prov.phases)[x].real(), (*prov.phases)[x].imag()});
    }
    p["phases"] = std::move(ph);
  }
  if (prov.radius) p["radius"] = *prov.radius;
  if (prov.seed) p["seed"] = *prov.seed;
  if (prov.max_displacement) p["max_displacement"] = *prov.max_displacement;
  if (prov.propagation) p["propagation"] = *prov.propagation;
  json doc;
  doc["matrix"] = bin.filename().generic_string();
  doc["source_space"] = relative_to(source_file, sidecar);
  doc["target_space"] = relative_to(target_file, sidecar);
  doc["provenance"] = std::move(p);
  write_text(sidecar, dump(doc));
}

IsoFile read_iso(const fs::path& sidecar) {
  const json doc = read_sidecar(sidecar);
  try {
    const auto source_file = resolve(sidecar, doc.at("source_space").get<std::string>());
    const auto target_file = resolve(sidecar, doc.at("target_space").get<std::string>());
    auto source = read_space(source_file);
    auto target = fs::equivalent(source_file, target_file) ? source : read_space(target_file);
    auto u = read_matrix(resolve(sidecar, doc.at("matrix").get<std::string>()));
    SpatialIsomorphism iso(source, target, std::move(u));

    IsoProvenance prov;
    if (doc.contains("provenance")) {
      const auto& p = doc.at("provenance");
      prov.kind = p.value("kind", std::string("file"));
      if (p.contains("f")) {
        std::vector<Index> f(source->size(), 0);
        std::vector<char> seen(source->size(), 0);
        for (auto it = p.at("f").begin(); it != p.at("f").end(); ++it) {
          const Index x = source->index_of(it.key());
          f[x] = target->index_of(point_id(it.value()));
          seen[x] = 1;
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
          throw Error(ErrorCode::FormatError, "provenance map f is not total");
        }
        prov.f = std::move(f);
      }
      if (p.contains("phases")) {
        std::vector<Complex> ph(source->size(), 1.0);
        for (auto it = p.at("phases").begin(); it != p.at("phases").end(); ++it) {
          ph[source->index_of(it.key())] = Complex(it.value().at(0).get<double>(), it.value().at(1).get<double>());
        }
        prov.phases = std::move(ph);
      }
      if (p.contains("radius")) prov.radius = p.at("radius").get<double>();
      if (p.contains("seed")) prov.seed = p.at("seed").get<std::uint64_t>();
      if (p.contains("max_displacement")) prov.max_displacement = p.at("max_displacement").get<double>();
      if (p.contains("propagation")) prov.propagation = p.at("propagation").get<double>();
    }
    return IsoFile{std::move(iso), std::move(prov), source_file, target_file};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, sidecar.string() + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::FormatError, e.what());
  }
}

std::optional<CoarseMap> truth_from(const IsoFile& file) {
  if (!file.provenance.f) return std::nullopt;
  return CoarseMap(file.iso.source(), file.iso.target(), *file.provenance.f);
}

json map_to_json(const CoarseMap& map) {
  json out = json::object();
  for (Index x = 0; x < map.table().size(); ++x) out[map.domain()->id(x)] = map.codomain()->id(map(x));
  return out;
}

json params_to_json(const SupportParams& params) {
  json out;
  if (params.kind == SupportParams::Kind::Support) {
    out["strategy"] = "support";
    out["eps"] = params.eps;
    out["m"] = params.m;
  } else {
    out["strategy"] = "flattened";
    out["r"] = params.r;
    out["threshold"] = params.threshold;
  }
  return out;
}

json profile_to_json(const ExpansionProfile& profile) {
  json out = json::object();
  for (const auto& [r, s] : profile.samples) out[format_double(r)] = s;
  return out;
}

json certificate_to_json(const BijectionCertificate& cert, const VerificationReport& report) {
  json doc;
  doc["schema"] = kCertificateSchema;
  doc["status"] = "ok";
  doc["h"] = map_to_json(cert.h);
  doc["f_raw"] = map_to_json(cert.f_raw);
  doc["g_raw"] = map_to_json(cert.g_raw);
  json params = params_to_json(cert.params);
  params["delta"] = cert.delta;
  doc["params"] = std::move(params);
  doc["closeness_h_f"] = cert.closeness_h_f;
  doc["closeness_fg_id"] = cert.closeness_fg_id;
  doc["closeness_gf_id"] = cert.closeness_gf_id;
  doc["goal_residual"] = cert.goal_residual;
  doc["goal_below_delta"] = cert.goal_residual < cert.delta;
  doc["expansion"] = profile_to_json(cert.expansion_h);
  doc["expansion_inv"] = profile_to_json(cert.expansion_h_inv);
  if (report.closeness_to_truth) doc["closeness_to_truth"] = *report.closeness_to_truth;
  doc["verified"] = report.ok;
  doc["failures"] = report.failures;
  return doc;
}

json failure_to_json(const ExtractionFailed& failure, const FiniteMetricSpace& source,
                     const FiniteMetricSpace& target) {
  auto side = [&](const std::string& stage) -> const FiniteMetricSpace& {
    return stage == "hall_backward" ? target : source;
  };
  json doc;
  doc["schema"] = kCertificateSchema;
  doc["status"] = "ExtractionFailed";
  doc["stage"] = failure.stage();
  doc["witness"] = ids_json(side(failure.stage()), failure.witness());
  json attempts = json::array();
  for (const auto& a : failure.attempts()) {
    json item;
    item["params"] = params_to_json(a.params);
    item["stage"] = a.stage;
    item["witness"] = ids_json(side(a.stage), a.witness);
    item["neighbourhood"] = a.neighbourhood;
    attempts.push_back(std::move(item));
  }
  doc["attempts"] = std::move(attempts);
  json residuals = json::array();
  for (const auto& row : failure.residuals()) {
    residuals.push_back({{"eps", row.eps}, {"forward", row.forward}, {"backward", row.backward}});
  }
  doc["residuals"] = std::move(residuals);
  doc["verified"] = false;
  doc["failures"] = json::array({std::string(failure.what())});
  return doc;
}

std::string goal_csv(const std::vector<GoalCell>& cells, const FiniteMetricSpace& source,
                     const FiniteMetricSpace& target) {
  std::string out = std::string("# ") + kGoalCsvSchema + "\n";
  out += "eps,m,residual,forward,backward,direction,witness,feasible_0.9,feasible_0.5,feasible_0.1\n";
  for (const auto& cell : cells) {
    const auto& e = cell.estimate;
    const bool backward = e.direction == GoalEstimate::Direction::Backward;
    const auto& space = backward ? target : source;
    std::string witness;
    for (std::size_t i = 0; i < e.witness.size(); ++i) {
      if (i) witness += ';';
      witness += space.id(e.witness[i]);
    }
    out += format_double(cell.eps) + "," + format_double(cell.m) + "," + format_double(e.residual) +
           "," + format_double(e.forward) + "," + format_double(e.backward) + "," +
           (backward ? "backward" : "forward") + ",\"" + witness + "\"," +
           (e.residual < 0.9 ? "1" : "0") + "," + (e.residual < 0.5 ? "1" : "0") + "," +
           (e.residual < 0.1 ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace roe::io
