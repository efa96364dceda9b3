#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "roe/generators.hpp"
#include "roe/io.hpp"

using namespace roe;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("roe-io-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string bytes_of(const Matrix& m) {
  std::ostringstream out;
  io::write_matrix(out, m);
  return out.str();
}

Matrix matrix_from(const std::string& bytes) {
  std::istringstream in(bytes);
  return io::read_matrix(in);
}

}  // namespace

TEST_CASE("space JSON in both forms") {
  const auto graph = io::space_from_json(json::parse(R"({"label": "P3", "points": [0, 1, 2], "edges": [[0, 1], [1, 2]]})"));
  CHECK(graph->dist(0, 2) == 2);
  CHECK(graph->id(1) == "1");

  const auto metric = io::space_from_json(
      json::parse(R"({"label": "tri", "points": ["a", "b", "c"], "dist": [[0, 1, 1.5], [1, 0, 1], [1.5, 1, 0]]})"));
  CHECK(metric->dist(0, 2) == 1.5);
  CHECK_FALSE(metric->integral());

  const auto back = io::space_from_json(io::space_to_json(*metric));
  CHECK(back->table() == metric->table());
  auto g = gen::grid(3, 4);
  CHECK(io::space_from_json(io::graph_space_to_json(*g))->table() == g->table());

  CHECK_THROWS_WITH_AS(io::space_from_json(json::parse(R"({"points": [0]})")), doctest::Contains("FormatError"),
                       Error);
  CHECK_THROWS_WITH_AS(io::space_from_json(json::parse(R"({"points": [0], "edges": [], "dist": [[0]]})")),
                       doctest::Contains("FormatError"), Error);
  CHECK_THROWS_AS(io::space_from_json(json::parse(R"({"points": [0, 1], "dist": [[0, 1], [2, 0]]})")),
                  MetricViolation);
  CHECK_THROWS_WITH_AS(io::space_from_json(json::parse(R"({"points": [0, 1], "edges": [[0, 5]]})")),
                       doctest::Contains("UnknownPoint"), Error);
}

TEST_CASE("binary matrix layout") {
  Matrix m(2, 3);
  m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(-1, 0), Complex(0, -1), Complex(0.25, 0.5);
  const auto bytes = bytes_of(m);
  REQUIRE(bytes.size() == 16 + 16 + 6 * 16);
  CHECK(bytes.compare(0, 8, std::string("ROEOP\0\0\0", 8)) == 0);
  for (int i = 8; i < 16; ++i) CHECK(bytes[std::size_t(i)] == 1);
  std::uint64_t rows = 0;
  std::memcpy(&rows, bytes.data() + 16, 8);
  CHECK(rows == 2);
  double second_re = 0;
  std::memcpy(&second_re, bytes.data() + 32 + 16, 8);
  CHECK(second_re == 3.0);  // row-major
  CHECK(matrix_from(bytes) == m);
}

TEST_CASE("corrupt matrices are format errors") {
  const auto good = bytes_of(Matrix::Identity(3, 3));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS(matrix_from(bad_magic), doctest::Contains("magic"), Error);
  auto bad_version = good;
  bad_version[12] = 2;
  CHECK_THROWS_WITH_AS(matrix_from(bad_version), doctest::Contains("version"), Error);
  CHECK_THROWS_WITH_AS(matrix_from(good.substr(0, good.size() - 5)), doctest::Contains("FormatError"), Error);
  CHECK_THROWS_WITH_AS(matrix_from(good.substr(0, 20)), doctest::Contains("FormatError"), Error);
  CHECK_THROWS_WITH_AS(matrix_from(good + "x"), doctest::Contains("trailing"), Error);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_WITH_AS(matrix_from(bytes_of(nan)), doctest::Contains("non-finite"), Error);
}

TEST_CASE("operator and isomorphism files round-trip") {
  const auto dir = scratch("roundtrip");
  auto g = gen::grid(3, 3);
  io::write_text(dir / "g.json", io::dump(io::graph_space_to_json(*g)));

  std::mt19937_64 rng(3);
  const Matrix u = haar_unitary(9, rng);
  const auto g2 = io::read_space(dir / "g.json");
  io::write_operator(dir / "op.json", LinearOperator(g2, u), dir / "g.json", dir / "g.json");
  const auto op = io::read_operator(dir / "op.json");
  CHECK(op.matrix() == u);
  CHECK(op.domain() == op.codomain());

  const auto f = gen::random_bce(g2, 2, 4);
  io::IsoProvenance prov;
  prov.kind = "bijection";
  prov.f = f.table();
  prov.phases = gen::random_phases(9, 2);
  prov.seed = 4;
  const auto iso = from_bijection(f, prov.phases);
  io::write_iso(dir / "iso.json", iso, prov, dir / "g.json", dir / "g.json");
  const auto file = io::read_iso(dir / "iso.json");
  CHECK(file.iso.unitary() == iso.unitary());
  CHECK(file.provenance.kind == "bijection");
  CHECK(*file.provenance.phases == *prov.phases);
  CHECK(file.provenance.seed == 4u);
  CHECK(io::truth_from(file)->table() == f.table());

  const auto sidecar = json::parse(io::read_text(dir / "iso.json"));
  CHECK(sidecar.at("source_space") == "g.json");
  CHECK(sidecar.at("matrix") == "iso.bin");
}

TEST_CASE("dump prints 17 significant digits with sorted keys") {
  CHECK(io::dump(json{{"b", 0.1}, {"a", 1.0}}, -1) == R"({"a":1,"b":0.10000000000000001})");
  CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("certificate and goal table serialization") {
  auto p5 = gen::path(5);
  const auto iso = from_bijection(gen::reversal(p5));
  const auto cert = extract(iso);
  const auto doc = io::certificate_to_json(cert, verify_certificate(cert, iso, gen::reversal(p5)));
  for (const char* key : {"h", "f_raw", "g_raw", "params", "closeness_h_f", "goal_residual", "expansion", "verified",
                          "failures", "schema", "status"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc.at("h").at("0") == "4");
  CHECK(doc.at("verified") == true);
  CHECK(doc.at("expansion").at("1") == 1);

  const auto cells = goal_table(iso, {0.5, 1.0}, {0}, {});
  const auto csv = io::goal_csv(cells, *p5, *p5);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# roe-goal-csv/1");
  std::getline(lines, line);
  CHECK(line == "eps,m,residual,forward,backward,direction,witness,feasible_0.9,feasible_0.5,feasible_0.1");
  std::getline(lines, line);
  CHECK(line == "0.5,0,0,0,0,forward,\"\",1,1,1");
  std::getline(lines, line);
  CHECK(line.rfind("1,0,1,1,1,forward,\"0\",0,0,0", 0) == 0);
}
