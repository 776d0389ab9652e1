#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "hodgelab/io.hpp"

using namespace hodgelab;

namespace {

double eval(const std::string& expr, double x = 0.0, double y = 0.0, double z = 0.0) {
  return parse_expression(expr)(x, y, z);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("expression values and precedence") {
  CHECK(eval("1 + 2 * 3") == doctest::Approx(7.0));
  CHECK(eval("(1 + 2) * 3") == doctest::Approx(9.0));
  CHECK(eval("2 ^ 3 ^ 2") == doctest::Approx(512.0));  // right associative
  CHECK(eval("-2 ^ 2") == doctest::Approx(-4.0));
  CHECK(eval("8 / 4 / 2") == doctest::Approx(1.0));
  CHECK(eval("pi") == doctest::Approx(M_PI));
  CHECK(eval("sin(pi / 2)") == doctest::Approx(1.0));
  CHECK(eval("sqrt(abs(-9))") == doctest::Approx(3.0));
  CHECK(eval("exp(log(5))") == doctest::Approx(5.0));
  CHECK(eval("x1 + 2 * x2 - x3", 1.0, 2.0, 3.0) == doctest::Approx(2.0));
  CHECK(eval("sin(2 * pi * x1) ^ 2", 0.25) == doctest::Approx(1.0));
  CHECK(eval("1e-3 + 2.5E2") == doctest::Approx(250.001));
}

TEST_CASE("expression errors carry the offending position") {
  const auto fails_mentioning = [](const std::string& expr, const std::string& what) {
    try {
      parse_expression(expr);
      return false;
    } catch (const StructuralError& e) {
      return std::string(e.what()).find(what) != std::string::npos;
    }
  };
  CHECK(fails_mentioning("1 +", "position"));
  CHECK(fails_mentioning("sin 3", "position"));
  CHECK(fails_mentioning("(1 + 2", "position"));
  CHECK(fails_mentioning("bogus(1)", "bogus"));
  CHECK(fails_mentioning("1 2", "position"));
  CHECK_THROWS_AS(parse_expression(""), StructuralError);
}

TEST_CASE("config parsing, fallbacks, and the content hash") {
  const std::string text =
      "# a comment line\n"
      "grid.cells = 4 4 8\n"
      "grid.lengths = 1.0 1.0 2.0\n"
      "grid.topology = box\n"
      "bc.xmin = tangential\n"
      "bc.xmax = tangential\n"
      "bc.ymin = normal   # trailing comment\n"
      "bc.ymax = normal\n"
      "bc.zmin = normal\n"
      "bc.zmax = normal\n"
      "eps.expr = 1 + x1\n"
      "n_list = 1 2 4\n"
      "tol = 1e-3\n";
  Config cfg = Config::from_string(text);
  CHECK(cfg.get_string("grid.topology", "") == "box");
  CHECK(cfg.get_double("tol", 0.0) == doctest::Approx(1e-3));
  CHECK(cfg.get_long("missing", 42) == 42);
  CHECK(cfg.get_longs("n_list") == std::vector<long>{1, 2, 4});
  CHECK(cfg.get_doubles("grid.lengths") == std::vector<double>{1.0, 1.0, 2.0});
  CHECK(cfg.hash().size() == 16);
  // The hash covers the raw bytes: any change moves it.
  CHECK(cfg.hash() != Config::from_string(text + "\n").hash());
  CHECK(cfg.hash() == Config::from_string(text).hash());

  GridSpec spec = cfg.grid_spec();
  CHECK(spec.cells[2] == 8);
  CHECK(spec.lengths[2] == doctest::Approx(2.0));
  CHECK(spec.topology == Topology::Box);
  CHECK(spec.bc[0] == FaceBc::Tangential);
  CHECK(spec.bc[2] == FaceBc::Normal);

  MaterialField mat = cfg.material();
  CHECK(mat.eps[0](0.5, 0.0, 0.0) == doctest::Approx(1.5));
  CHECK(mat.mu[0](0.5, 0.0, 0.0) == doctest::Approx(1.0));  // default
}

TEST_CASE("config rejects malformed lines with a line number") {
  try {
    Config::from_string("grid.cells = 4\nnot a key value line\n", "conf");
    CHECK(false);
  } catch (const StructuralError& e) {
    const std::string what = e.what();
    CHECK(what.find("conf") != std::string::npos);
    CHECK(what.find("2") != std::string::npos);
  }
  // Torus plus boundary conditions is contradictory.
  Config bad = Config::from_string(
      "grid.cells = 2 2 2\ngrid.topology = torus\nbc.xmin = tangential\n");
  CHECK_THROWS_AS(bad.grid_spec(), StructuralError);
  CHECK_THROWS_AS(Config::from_file("/nonexistent/path.cfg"), StructuralError);
}

TEST_CASE("matrix market round trip") {
  SpMat a(4, 3);
  std::vector<Eigen::Triplet<double>> ts = {
      {0, 0, 1.5}, {2, 1, -2.25}, {3, 2, 1e-7}, {1, 0, 3.0}};
  a.setFromTriplets(ts.begin(), ts.end());
  const auto path = temp_file("hodgelab_test_matrix.mtx");
  write_matrix_market(path.string(), a);
  SpMat b = read_matrix_market(path.string());
  CHECK(b.rows() == 4);
  CHECK(b.cols() == 3);
  CHECK(Mat(Mat(a) - Mat(b)).cwiseAbs().maxCoeff() <= 1e-15);
  std::remove(path.string().c_str());

  Vec v(5);
  v << 1.0, -2.0, 0.0, 3.5e-4, 7.0;
  const auto vpath = temp_file("hodgelab_test_vector.mtx");
  write_vector_market(vpath.string(), v);
  Vec w = read_vector_market(vpath.string());
  REQUIRE(w.size() == 5);
  CHECK((v - w).cwiseAbs().maxCoeff() <= 1e-15);
  std::remove(vpath.string().c_str());
}

TEST_CASE("hash function pins the reference value") {
  // FNV-1a 64-bit test vector.
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("hello") != fnv1a_hex("hellp"));
}
