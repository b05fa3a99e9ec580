#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sobocert/space.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run(const std::string& command) {
  const int status = std::system((command + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

fs::path write_sample_space(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path path = dir / "space.txt";
  std::ofstream out(path);
  out << "space 8 3\n";
  out << "p 0 0 1 1\n";
  double r = 0.9;
  for (int i = 1; i < 8; ++i) {
    out << "p " << i << " " << r << " 1 1\n";
    r *= 1.7;
  }
  for (int i = 0; i < 7; ++i) {
    out << "nb " << i << " " << i + 1 << "\n";
  }
  return path;
}

fs::path write_sample_graph(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path path = dir / "graph.txt";
  std::ofstream out(path);
  out << "graph 3\nv 0 1\nv 1 1\nv 2 1\ne 0 1\ne 1 2\n";
  return path;
}

}  // namespace

TEST_CASE("space files round-trip through the text format") {
  const fs::path dir = fs::temp_directory_path() / "sobocert_space_test";
  const fs::path path = write_sample_space(dir);
  sobocert::FiniteMetricMeasureSpace space =
      sobocert::read_space_file(path.string());
  CHECK(space.point_count() == 8);
  CHECK(space.dimension() == 3);
  const fs::path copy = dir / "copy.txt";
  sobocert::write_space_file(copy.string(), space);
  sobocert::FiniteMetricMeasureSpace again =
      sobocert::read_space_file(copy.string());
  for (std::size_t x = 0; x < 8; ++x) {
    CHECK(again.radial(static_cast<sobocert::PointId>(x)) ==
          space.radial(static_cast<sobocert::PointId>(x)));
  }
}

TEST_CASE("CLI subcommands run and write deterministic reports") {
  if (!fs::exists("sobocert")) {
    MESSAGE("sobocert binary not found next to the test runner; skipping");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "sobocert_cli_test";
  fs::remove_all(dir);
  const fs::path space = write_sample_space(dir);
  const fs::path graph = write_sample_graph(dir);

  SUBCASE("graph report twice gives identical bytes") {
    const std::string cmd = "./sobocert graph --input " + graph.string() +
                            " --kind isoperimetric --k inf --seed 3 --out " +
                            (dir / "a").string();
    REQUIRE(run(cmd) == 0);
    const std::string cmd2 = "./sobocert graph --input " + graph.string() +
                             " --kind isoperimetric --k inf --seed 3 --out " +
                             (dir / "b").string();
    REQUIRE(run(cmd2) == 0);
    CHECK(slurp(dir / "a" / "graph_report.json") ==
          slurp(dir / "b" / "graph_report.json"));
    CHECK(slurp(dir / "a" / "graph_report.json").find("\"constant\"") !=
          std::string::npos);
  }

  SUBCASE("cover writes covering and validation") {
    const std::string cmd = "./sobocert cover --input " + space.string() +
                            " --kappa 2 --out " + (dir / "cover").string();
    REQUIRE(run(cmd) == 0);
    CHECK(fs::exists(dir / "cover" / "covering.json"));
    const std::string validation = slurp(dir / "cover" / "validation.json");
    CHECK(validation.find("\"violations\": []") != std::string::npos);
  }

  SUBCASE("patch writes a certificate") {
    const std::string cmd = "./sobocert patch --input " + space.string() +
                            " --kappa 2 --p 2 --k inf --out " +
                            (dir / "patch").string();
    REQUIRE(run(cmd) == 0);
    const std::string cert = slurp(dir / "patch" / "certificate.json");
    CHECK(cert.find("\"constant\"") != std::string::npos);
    CHECK(cert.find("\"provenance\"") != std::string::npos);
  }

  SUBCASE("manifold emits the residual and the CSV") {
    const std::string cmd =
        "./sobocert manifold --kind schwarzschild --n 4 --gamma-core 1 "
        "--rmax 1e4 --out " + (dir / "manifold").string();
    REQUIRE(run(cmd) == 0);
    CHECK(fs::exists(dir / "manifold" / "profile.csv"));
    const std::string fits = slurp(dir / "manifold" / "fits.json");
    CHECK(fits.find("firstIntegralResidual") != std::string::npos);
  }

  SUBCASE("analyze writes a witness") {
    const std::string cmd = "./sobocert analyze --input " + space.string() +
                            " --estimator hardy --p 1 --out " +
                            (dir / "analyze").string();
    REQUIRE(run(cmd) == 0);
    CHECK(fs::exists(dir / "analyze" / "witness.csv"));
    CHECK(slurp(dir / "analyze" / "analysis.json").find("\"bound\"") !=
          std::string::npos);
  }

  SUBCASE("multistart reports are byte-identical across runs") {
    const std::string base = "./sobocert analyze --input " + space.string() +
                             " --estimator sobolev --n 3 --seed 11 --out ";
    REQUIRE(run(base + (dir / "s1").string()) == 0);
    REQUIRE(run(base + (dir / "s2").string()) == 0);
    CHECK(slurp(dir / "s1" / "analysis.json") ==
          slurp(dir / "s2" / "analysis.json"));
    CHECK(slurp(dir / "s1" / "witness.csv") ==
          slurp(dir / "s2" / "witness.csv"));
  }

  SUBCASE("config files feed defaults and flags win") {
    REQUIRE(run("./sobocert graph --input " + graph.string() +
                " --kind isoperimetric --k inf --seed 3 --out " +
                (dir / "a").string()) == 0);
    const fs::path config = dir / "config.json";
    {
      std::ofstream out(config);
      out << "{\"command\":\"graph\",\"input\":\"" << graph.string()
          << "\",\"kind\":\"isoperimetric\",\"k\":\"inf\",\"seed\":3,"
          << "\"out\":\"" << (dir / "c").string() << "\"}";
    }
    REQUIRE(run("./sobocert graph --config " + config.string() + " --input " +
                graph.string()) == 0);
    CHECK(slurp(dir / "c" / "graph_report.json") ==
          slurp(dir / "a" / "graph_report.json"));
  }

  SUBCASE("bad arguments exit with the config code") {
    CHECK(run("./sobocert graph") == 2);
    CHECK(run("./sobocert graph --input /nonexistent/file") == 2);
    CHECK(run("./sobocert nonsense") == 2);
  }
}
