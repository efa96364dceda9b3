#include "roe/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>

#include "roe/generators.hpp"
#include "roe/io.hpp"
#include "roe/rigidity.hpp"
#include "roe/selftest.hpp"

namespace roe::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

void print_profile(std::ostream& out, const std::string& name, const ExpansionProfile& p) {
  out << name << ":";
  for (const auto& [r, s] : p.samples) out << " " << io::format_double(r) << "->" << io::format_double(s);
  out << '\n';
}

CoarseMap load_bijection(const std::string& choice, const SpacePtr& space) {
  if (choice == "identity") return CoarseMap::identity(space);
  if (choice == "reversal") return gen::reversal(space);
  json doc;
  try {
    doc = json::parse(io::read_text(choice));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, choice + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::FormatError, choice + ": bijection must be an {id: id} object");
  std::vector<Index> table(space->size(), space->size());
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string target = it.value().is_string() ? it.value().get<std::string>()
                                                      : std::to_string(it.value().get<long long>());
    table[space->index_of(it.key())] = space->index_of(target);
  }
  if (std::find(table.begin(), table.end(), space->size()) != table.end()) {
    throw Error(ErrorCode::NotBijective, choice + ": map is not defined on every point");
  }
  CoarseMap f(space, space, std::move(table));
  f.require_bijective();
  return f;
}

struct GenArgs {
  std::string kind;
  std::vector<double> params;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const auto space = gen::by_name(a.kind, a.params, a.seed);
  const std::string text = io::dump(io::graph_space_to_json(*space));
  if (a.out.empty()) {
    out << text;
    return kExitOk;
  }
  io::write_text(a.out, text);
  out << "wrote " << a.out << " (" << space->size() << " points, diameter "
      << io::format_double(space->diameter()) << ")\n";
  for (int r = 1; r <= 5; ++r) out << "growth(" << r << ") = " << growth(*space, r) << '\n';
  return kExitOk;
}

struct IsoArgs {
  std::string space;
  std::string bijection = "identity";
  std::optional<double> random_bce;
  bool phases = false;
  std::optional<double> perturb;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_iso(const IsoArgs& a, std::ostream& out) {
  const auto space = io::read_space(a.space);
  io::IsoProvenance prov;
  prov.kind = "bijection";
  prov.seed = a.seed;
  CoarseMap f = a.random_bce ? gen::random_bce(space, *a.random_bce, a.seed) : load_bijection(a.bijection, space);
  prov.f = f.table();
  prov.max_displacement = gen::max_displacement(f);
  if (a.phases) prov.phases = gen::random_phases(space->size(), a.seed);
  auto iso = from_bijection(f, prov.phases);
  if (a.perturb) {
    // Distinct stream from the bijection and phase draws.
    const auto w = random_local_unitary(space, *a.perturb, a.seed ^ 0x5bd1e995ULL);
    prov.kind = "perturbed";
    prov.radius = *a.perturb;
    prov.propagation = propagation(w, 1e-10);
    iso = perturb(iso, w);
  }
  io::write_iso(a.out, iso, prov, a.space, a.space);
  const std::vector<double> radii{1, 2, 3, 4, 5};
  out << "wrote " << a.out << " (kind " << prov.kind << ")\n";
  out << "max displacement: " << io::format_double(*prov.max_displacement) << '\n';
  print_profile(out, "expansion f", expansion_profile(f, radii));
  print_profile(out, "expansion f^-1", expansion_profile(f.inverse(), radii));
  if (prov.propagation) out << "propagation(w): " << io::format_double(*prov.propagation) << '\n';
  return kExitOk;
}

struct ExtractArgs {
  std::string iso;
  std::string strategy = "support";
  std::vector<double> eps;
  std::vector<double> m;
  std::vector<double> r;
  double delta = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "json") throw Error(ErrorCode::InvalidParams, "extract writes json only");
  const auto file = io::read_iso(a.iso);
  ExtractParams params;
  params.strategy = a.strategy == "flattened" ? SupportParams::Kind::Flattened : SupportParams::Kind::Support;
  if (!a.eps.empty()) params.eps_grid = a.eps;
  if (!a.m.empty()) params.m_grid = a.m;
  if (!a.r.empty()) params.r_grid = a.r;
  params.delta = a.delta;
  params.sampler.seed = a.seed;

  std::ostream& summary = a.out.empty() ? err : out;
  auto emit = [&](const json& doc) {
    const auto text = io::dump(doc);
    if (a.out.empty()) {
      out << text;
    } else {
      io::write_text(a.out, text);
    }
  };
  try {
    const auto cert = extract(file.iso, params);
    const auto truth = io::truth_from(file);
    const auto report = verify_certificate(cert, file.iso, truth, params.sampler);
    emit(io::certificate_to_json(cert, report));
    summary << "extracted bijection at " << io::params_to_json(cert.params).dump() << '\n';
    summary << "closeness(h, f_raw) = " << io::format_double(cert.closeness_h_f)
            << ", goal residual = " << io::format_double(cert.goal_residual) << '\n';
    if (report.closeness_to_truth) {
      summary << "closeness(h, f_true) = " << io::format_double(*report.closeness_to_truth) << '\n';
    }
    print_profile(summary, "expansion h", cert.expansion_h);
    summary << (report.ok ? "certificate verified\n" : "certificate FAILED verification\n");
    for (const auto& f : report.failures) summary << "  " << f << '\n';
    return report.ok ? kExitOk : kExitExtraction;
  } catch (const ExtractionFailed& e) {
    emit(io::failure_to_json(e, *file.iso.source(), *file.iso.target()));
    err << e.what() << '\n';
    const auto& space = e.stage() == "hall_backward" ? *file.iso.target() : *file.iso.source();
    err << "  stage: " << e.stage() << ", deficiency witness:";
    for (Index x : e.witness()) err << " " << space.id(x);
    err << '\n';
    for (const auto& row : e.residuals()) {
      err << "  eps " << io::format_double(row.eps) << ": pointwise residual "
          << io::format_double(row.worst()) << '\n';
    }
    return kExitExtraction;
  }
}

struct GoalArgs {
  std::string iso;
  std::vector<double> eps{0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  std::vector<double> m{0, 1, 2, 3, 5, 8};
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_goal(const GoalArgs& a, std::ostream& out) {
  const auto file = io::read_iso(a.iso);
  SetSampler sampler;
  sampler.seed = a.seed;
  const auto cells = goal_table(file.iso, a.eps, a.m, sampler);
  std::string text;
  if (a.format == "csv") {
    text = io::goal_csv(cells, *file.iso.source(), *file.iso.target());
  } else if (a.format == "json") {
    json rows = json::array();
    for (const auto& c : cells) {
      const bool back = c.estimate.direction == GoalEstimate::Direction::Backward;
      const auto& space = back ? *file.iso.target() : *file.iso.source();
      rows.push_back({{"eps", c.eps},
                      {"m", c.m},
                      {"residual", c.estimate.residual},
                      {"forward", c.estimate.forward},
                      {"backward", c.estimate.backward},
                      {"direction", back ? "backward" : "forward"},
                      {"witness", space.to_ids(c.estimate.witness)}});
    }
    text = io::dump(json{{"schema", io::kGoalCsvSchema}, {"rows", rows}});
  } else {
    throw Error(ErrorCode::InvalidParams, "unknown format " + a.format);
  }
  if (a.out.empty()) {
    out << text;
  } else {
    io::write_text(a.out, text);
    out << "wrote " << cells.size() << " rows to " << a.out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recover bijective coarse equivalences from spatial isomorphisms of uniform Roe algebras"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a space file");
  gen_cmd->add_option("kind", gen_args.kind, "path|cycle|grid|tree|random-geometric|expander-sample")->required();
  gen_cmd->add_option("params", gen_args.params, "Generator parameters");
  gen_cmd->add_option("--seed", gen_args.seed, "Seed for randomized generators");
  gen_cmd->add_option("--out", gen_args.out, "Output space JSON");

  IsoArgs iso_args;
  auto* iso_cmd = app.add_subcommand("iso", "Generate an isomorphism file");
  iso_cmd->add_option("--space", iso_args.space, "Space JSON")->required();
  iso_cmd->add_option("--bijection", iso_args.bijection, "identity|reversal|PATH to {id: id} JSON");
  iso_cmd->add_option("--random-bce", iso_args.random_bce, "Random bijection with this displacement bound");
  iso_cmd->add_flag("--phases", iso_args.phases, "Twist by seeded unit phases");
  iso_cmd->add_option("--perturb", iso_args.perturb, "Compose with a random local unitary of this radius");
  iso_cmd->add_option("--seed", iso_args.seed, "Seed");
  iso_cmd->add_option("--out", iso_args.out, "Output sidecar JSON (matrix goes to .bin)")->required();

  ExtractArgs ex_args;
  auto* ex_cmd = app.add_subcommand("extract", "Extract a bijective coarse equivalence");
  ex_cmd->add_option("--iso", ex_args.iso, "Isomorphism sidecar JSON")->required();
  ex_cmd->add_option("--strategy", ex_args.strategy)->check(CLI::IsMember({"support", "flattened"}));
  ex_cmd->add_option("--eps", ex_args.eps, "eps grid")->delimiter(',');
  ex_cmd->add_option("--m", ex_args.m, "m grid")->delimiter(',');
  ex_cmd->add_option("--r", ex_args.r, "r grid (flattened strategy)")->delimiter(',');
  ex_cmd->add_option("--delta", ex_args.delta, "Target GOAL residual");
  ex_cmd->add_option("--seed", ex_args.seed, "Set sampler seed");
  ex_cmd->add_option("--out", ex_args.out, "Certificate JSON path (stdout if omitted)");
  ex_cmd->add_option("--format", ex_args.format)->check(CLI::IsMember({"json", "csv"}));

  GoalArgs goal_args;
  auto* goal_cmd = app.add_subcommand("goal", "Tabulate GOAL residuals over an (eps, m) grid");
  goal_cmd->add_option("--iso", goal_args.iso, "Isomorphism sidecar JSON")->required();
  goal_cmd->add_option("--eps", goal_args.eps, "eps grid")->delimiter(',');
  goal_cmd->add_option("--m", goal_args.m, "m grid")->delimiter(',');
  goal_cmd->add_option("--seed", goal_args.seed, "Set sampler seed");
  goal_cmd->add_option("--out", goal_args.out, "Output path (stdout if omitted)");
  goal_cmd->add_option("--format", goal_args.format)->check(CLI::IsMember({"json", "csv"}));

  std::string fault;
  auto* self_cmd = app.add_subcommand("selftest", "Run the invariant suite at fixed seeds");
  self_cmd->add_option("--fault", fault, "Inject a fault")->check(CLI::IsMember({"tie-break", "unitarity"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen_args, out);
    if (*iso_cmd) return cmd_iso(iso_args, out);
    if (*ex_cmd) return cmd_extract(ex_args, out, err);
    if (*goal_cmd) return cmd_goal(goal_args, out);
    if (*self_cmd) {
      SelftestFaults faults;
      faults.flip_tie_break = fault == "tie-break";
      faults.break_unitarity = fault == "unitarity";
      return print_selftest(run_selftest(faults), out) == 0 ? kExitOk : kExitInput;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace roe::cli
