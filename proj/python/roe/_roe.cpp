#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roe/generators.hpp"
#include "roe/io.hpp"
#include "roe/rigidity.hpp"
#include "roe/selftest.hpp"

namespace py = pybind11;
using namespace roe;

namespace {

// Python-side handles. The core shares spaces as shared_ptr<const T>, which
// pybind11 cannot hold directly.
struct Space {
  SpacePtr ptr;
};

struct Map {
  CoarseMap map;
};

struct Iso {
  SpatialIsomorphism iso;
};

py::object to_python(const io::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

PointSet ids_to_set(const Space& s, const std::vector<std::string>& ids) { return s.ptr->to_indices(ids); }

py::dict family_dict(const SupportFamily& fam) {
  py::dict out;
  for (Index x = 0; x < fam.sets.size(); ++x) out[py::str(fam.source->id(x))] = fam.target->to_ids(fam.sets[x]);
  return out;
}

LinearOperator as_op(const Space& s, const Matrix& a) { return LinearOperator(s.ptr, a); }

ExtractParams make_params(const std::string& strategy, const std::optional<std::vector<double>>& eps,
                          const std::optional<std::vector<double>>& m,
                          const std::optional<std::vector<double>>& r, double delta, std::uint64_t seed) {
  ExtractParams p;
  if (strategy == "flattened") {
    p.strategy = SupportParams::Kind::Flattened;
  } else if (strategy != "support") {
    throw Error(ErrorCode::InvalidParams, "unknown strategy " + strategy);
  }
  if (eps) p.eps_grid = *eps;
  if (m) p.m_grid = *m;
  if (r) p.r_grid = *r;
  p.delta = delta;
  p.sampler.seed = seed;
  return p;
}

}  // namespace

PYBIND11_MODULE(_roe, m) {
  m.doc() = "Coarse-geometric rigidity of uniform Roe algebras on finite metric spaces";

  py::register_exception<Error>(m, "RoeError", PyExc_RuntimeError);

  py::class_<Space>(m, "Space")
      .def_static(
          "from_graph",
          [](std::vector<std::string> ids, const std::vector<std::pair<std::string, std::string>>& edges,
             std::string label) {
            std::unordered_map<std::string, Index> pos;
            for (Index i = 0; i < ids.size(); ++i) pos.emplace(ids[i], i);
            std::vector<std::pair<Index, Index>> e;
            for (const auto& [a, b] : edges) {
              auto ia = pos.find(a), ib = pos.find(b);
              if (ia == pos.end() || ib == pos.end()) {
                throw Error(ErrorCode::UnknownPoint, "edge endpoint " + (ia == pos.end() ? a : b));
              }
              e.emplace_back(ia->second, ib->second);
            }
            return Space{FiniteMetricSpace::from_graph(std::move(ids), e, std::move(label))};
          },
          py::arg("ids"), py::arg("edges"), py::arg("label") = "")
      .def_static(
          "from_distances",
          [](std::vector<std::string> ids, const Eigen::MatrixXd& d, std::string label) {
            std::vector<double> flat(std::size_t(d.size()));
            for (Eigen::Index i = 0; i < d.rows(); ++i)
              for (Eigen::Index j = 0; j < d.cols(); ++j) flat[std::size_t(i * d.cols() + j)] = d(i, j);
            if (std::size_t(d.rows()) != ids.size() || d.rows() != d.cols()) {
              throw Error(ErrorCode::MetricViolation, "distance matrix shape does not match ids");
            }
            return Space{FiniteMetricSpace::build(std::move(ids), std::move(flat), std::move(label))};
          },
          py::arg("ids"), py::arg("dist"), py::arg("label") = "")
      .def_static("load", [](const std::string& path) { return Space{io::read_space(path)}; })
      .def("save", [](const Space& s, const std::string& path) {
        io::write_text(path, io::dump(io::graph_space_to_json(*s.ptr)));
      })
      .def("__len__", [](const Space& s) { return s.ptr->size(); })
      .def_property_readonly("ids", [](const Space& s) { return s.ptr->ids(); })
      .def_property_readonly("label", [](const Space& s) { return s.ptr->label(); })
      .def_property_readonly("diameter", [](const Space& s) { return s.ptr->diameter(); })
      .def("dist",
           [](const Space& s, const std::string& a, const std::string& b) {
             return s.ptr->dist(s.ptr->index_of(a), s.ptr->index_of(b));
           })
      .def("distance_matrix",
           [](const Space& s) {
             const auto n = Eigen::Index(s.ptr->size());
             Eigen::MatrixXd d(n, n);
             for (Eigen::Index i = 0; i < n; ++i)
               for (Eigen::Index j = 0; j < n; ++j) d(i, j) = s.ptr->dist(Index(i), Index(j));
             return d;
           })
      .def("ball",
           [](const Space& s, const std::vector<std::string>& centers, double r) {
             return s.ptr->to_ids(ball(*s.ptr, ids_to_set(s, centers), r));
           })
      .def("growth", [](const Space& s, double r) { return growth(*s.ptr, r); });

  m.def("generate", [](const std::string& kind, const std::vector<double>& params,
                       std::optional<std::uint64_t> seed) { return Space{gen::by_name(kind, params, seed)}; },
        py::arg("kind"), py::arg("params"), py::arg("seed") = py::none());
  m.def("path", [](std::size_t n) { return Space{gen::path(n)}; });
  m.def("cycle", [](std::size_t n) { return Space{gen::cycle(n)}; });
  m.def("grid", [](std::size_t rows, std::size_t cols) { return Space{gen::grid(rows, cols)}; });

  py::class_<Map>(m, "Map")
      .def(py::init([](const Space& domain, const Space& codomain, const std::map<std::string, std::string>& t) {
        std::vector<Index> table(domain.ptr->size(), codomain.ptr->size());
        for (const auto& [x, y] : t) table[domain.ptr->index_of(x)] = codomain.ptr->index_of(y);
        for (Index x = 0; x < table.size(); ++x) {
          if (table[x] == codomain.ptr->size()) {
            throw Error(ErrorCode::UnknownPoint, "map undefined at " + domain.ptr->id(x));
          }
        }
        return Map{CoarseMap(domain.ptr, codomain.ptr, std::move(table))};
      }))
      .def_static("identity", [](const Space& s) { return Map{CoarseMap::identity(s.ptr)}; })
      .def_static("reversal", [](const Space& s) { return Map{gen::reversal(s.ptr)}; })
      .def_static("random_bce",
                  [](const Space& s, double d, std::uint64_t seed) { return Map{gen::random_bce(s.ptr, d, seed)}; })
      .def("__call__", [](const Map& f, const std::string& x) {
        return f.map.codomain()->id(f.map(f.map.domain()->index_of(x)));
      })
      .def("to_dict", [](const Map& f) { return to_python(io::map_to_json(f.map)); })
      .def("inverse", [](const Map& f) { return Map{f.map.inverse()}; })
      .def("bijective", [](const Map& f) { return f.map.bijective(); })
      .def("injective", [](const Map& f) { return f.map.injective(); })
      .def("expansion_profile",
           [](const Map& f, const std::vector<double>& radii) { return expansion_profile(f.map, radii).samples; })
      .def("__eq__", [](const Map& a, const Map& b) { return a.map == b.map; });

  m.def("compose", [](const Map& g, const Map& f) { return Map{compose(g.map, f.map)}; });
  m.def("closeness", [](const Map& f, const Map& g) { return closeness(f.map, g.map); });
  m.def("csb_combine", [](const Map& f, const Map& g) { return Map{csb_combine(f.map, g.map)}; });

  m.def("propagation", [](const Space& s, const Matrix& a, double tol) { return propagation(as_op(s, a), tol); },
        py::arg("space"), py::arg("a"), py::arg("zero_tol") = kZeroTol);
  m.def("quasi_local_profile",
        [](const Space& s, const Matrix& a, const std::vector<double>& radii) {
          return quasi_local_profile(as_op(s, a), radii).samples;
        });
  m.def("conditional_expectation",
        [](const Space& s, const Matrix& a) { return Matrix(conditional_expectation(as_op(s, a)).matrix()); });
  m.def("block_norm", [](const Space& s, const Matrix& a, const std::vector<std::string>& rows,
                         const std::vector<std::string>& cols) {
    return block_norm(as_op(s, a), ids_to_set(s, rows), ids_to_set(s, cols));
  });
  m.def("op_norm", [](const Matrix& a) { return op_norm(a); });
  m.def("numerical_rank", [](const Matrix& a, double tol) { return numerical_rank(a, tol); }, py::arg("a"),
        py::arg("tol") = 1e-9);
  m.def("flattened_indicator", [](const Space& s, const std::vector<std::string>& set, double r) {
    return flattened_indicator(s.ptr, ids_to_set(s, set), r).values();
  });
  m.def("so_variation", [](const Space& s, const std::vector<double>& values, double r) {
    return so_variation(DiagonalFunction(s.ptr, values), r);
  });

  py::class_<Iso>(m, "Iso")
      .def(py::init([](const Space& source, const Space& target, const Matrix& u) {
        return Iso{SpatialIsomorphism(source.ptr, target.ptr, u)};
      }))
      .def_static("from_bijection",
                  [](const Map& f, std::optional<std::vector<Complex>> phases) {
                    return Iso{from_bijection(f.map, phases)};
                  },
                  py::arg("f"), py::arg("phases") = py::none())
      .def_static("load", [](const std::string& path) { return Iso{io::read_iso(path).iso}; })
      .def("perturb",
           [](const Iso& i, double radius, std::uint64_t seed) {
             return Iso{perturb(i.iso, random_local_unitary(i.iso.source(), radius, seed))};
           })
      .def_property_readonly("unitary", [](const Iso& i) { return i.iso.unitary(); })
      .def_property_readonly("source", [](const Iso& i) { return Space{i.iso.source()}; })
      .def_property_readonly("target", [](const Iso& i) { return Space{i.iso.target()}; })
      .def("apply", [](const Iso& i, const Matrix& a) {
        return Matrix(i.iso.apply(LinearOperator(i.iso.source(), a)).matrix());
      })
      .def("support_family", [](const Iso& i, double eps, double m) {
        return family_dict(support_family(i.iso, eps, m));
      })
      .def("hall_check",
           [](const Iso& i, double eps, double m) {
             const auto w = hall_check(support_family(i.iso, eps, m));
             return py::make_tuple(w.ok(), i.iso.source()->to_ids(w.deficiency));
           })
      .def("goal_residual", [](const Iso& i, const std::vector<std::string>& set,
                               const std::vector<std::string>& kept) {
        return goal_residual(i.iso, i.iso.source()->to_indices(set), i.iso.target()->to_indices(kept));
      });

  m.def(
      "extract",
      [](const Iso& i, const std::string& strategy, std::optional<std::vector<double>> eps,
         std::optional<std::vector<double>> mg, std::optional<std::vector<double>> r, double delta,
         std::uint64_t seed, std::optional<Map> truth) {
        const auto params = make_params(strategy, eps, mg, r, delta, seed);
        const auto cert = extract(i.iso, params);
        std::optional<CoarseMap> t;
        if (truth) t = truth->map;
        return to_python(io::certificate_to_json(cert, verify_certificate(cert, i.iso, t, params.sampler)));
      },
      py::arg("iso"), py::arg("strategy") = "support", py::arg("eps") = py::none(), py::arg("m") = py::none(),
      py::arg("r") = py::none(), py::arg("delta") = 0.5, py::arg("seed") = 0, py::arg("truth") = py::none());

  m.def(
      "goal_csv",
      [](const Iso& i, const std::vector<double>& eps, const std::vector<double>& mg, std::uint64_t seed) {
        SetSampler sampler;
        sampler.seed = seed;
        return io::goal_csv(goal_table(i.iso, eps, mg, sampler), *i.iso.source(), *i.iso.target());
      },
      py::arg("iso"), py::arg("eps") = std::vector<double>{0.5, 0.4, 0.3, 0.2, 0.1, 0.05},
      py::arg("m") = std::vector<double>{0, 1, 2, 3, 5, 8}, py::arg("seed") = 0);

  m.def("selftest", []() {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& r : run_selftest()) out.emplace_back(r.name, r.passed, r.detail);
    return out;
  });
}
