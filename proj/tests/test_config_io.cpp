#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "hmcf/config.hpp"
#include "hmcf/csv_io.hpp"
#include "hmcf/experiments.hpp"

using namespace hmcf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("hmcf_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal circle config fills defaults") {
  ConfigParse p = parse_config("geometry = circle\n");
  REQUIRE(p.errors.empty());
  CHECK(p.config->geometry == "circle");
  CHECK(p.config->n1 == 64);
  CHECK(p.config->cfl_safety == doctest::Approx(0.25));
  CHECK(p.config->det_floor == doctest::Approx(1e-10));
  CHECK(p.config->h_max == doctest::Approx(1e6));
  CHECK(p.config->ode_tol == doctest::Approx(1e-10));
  CHECK(p.config->precision == 17);
}

TEST_CASE("strict parsing: ranges, unknown keys, all errors collected") {
  SUBCASE("cfl_safety out of range names the field") {
    ConfigParse p = parse_config("cfl_safety = 1.5\n");
    REQUIRE(p.errors.size() == 1);
    CHECK(p.errors[0].message.find("cfl_safety") != std::string::npos);
    CHECK(p.errors[0].message.find("(0, 0.9]") != std::string::npos);
  }
  SUBCASE("unknown key is rejected with its line") {
    ConfigParse p = parse_config("# comment\ndx = 3\n");
    REQUIRE(p.errors.size() == 1);
    CHECK(p.errors[0].line == 2);
    CHECK(p.errors[0].message.find("dx") != std::string::npos);
  }
  SUBCASE("every error is reported, not just the first") {
    ConfigParse p = parse_config("cfl_safety = 1.5\nn1 = 3\nbogus = 1\n");
    CHECK(p.errors.size() == 3);
    CHECK_FALSE(p.config.has_value());
  }
  SUBCASE("sections and comments are accepted") {
    ConfigParse p = parse_config("[run]\ngeometry = circle # trailing comment\n\n[other]\n");
    CHECK(p.errors.empty());
  }
  SUBCASE("missing equals sign") {
    ConfigParse p = parse_config("geometry circle\n");
    REQUIRE(p.errors.size() == 1);
    CHECK(p.errors[0].message.find("key = value") != std::string::npos);
  }
  SUBCASE("cross-field validation") {
    ConfigParse p = parse_config("experiment = stability\ngeometry = circle\n");
    REQUIRE_FALSE(p.errors.empty());
  }
}

TEST_CASE("overrides re-validate") {
  SimConfig base;
  ConfigParse good = apply_overrides(base, {"n1=128", "cfl_safety=0.1"});
  REQUIRE(good.errors.empty());
  CHECK(good.config->n1 == 128);
  ConfigParse bad = apply_overrides(base, {"n1=128", "cfl_safety=2.0", "junk"});
  CHECK(bad.errors.size() == 2);
}

TEST_CASE("mesh snapshot round-trips bitwise") {
  const fs::path dir = temp_dir("mesh");
  SUBCASE("circle") {
    Immersion im = make_circle(1.0, 8);
    write_mesh_snapshot(dir / "c.txt", im);
    const std::string text = slurp(dir / "c.txt");
    int vlines = 0;
    for (std::size_t pos = 0; (pos = text.find("\nv ", pos)) != std::string::npos; ++pos) {
      ++vlines;
    }
    CHECK(vlines + (text.rfind("v ", 0) == 0 ? 1 : 0) == 8);
    Immersion back = read_mesh_snapshot(dir / "c.txt");
    REQUIRE(back.points.size() == im.points.size());
    for (std::size_t p = 0; p < im.points.size(); ++p) {
      CHECK(back.points[p].x == im.points[p].x);
      CHECK(back.points[p].y == im.points[p].y);
    }
    CHECK(back.grid.spacing[0] == im.grid.spacing[0]);
    CHECK(back.grid.periodic[0] == im.grid.periodic[0]);
  }
  SUBCASE("sphere band 16x16 carries the z column and band metadata") {
    Immersion im = make_sphere_band(1.0, std::numbers::pi / 4.0, 16, 16);
    write_mesh_snapshot(dir / "s.txt", im);
    Immersion back = read_mesh_snapshot(dir / "s.txt");
    REQUIRE(back.points.size() == 256);
    CHECK(back.ambient == 3);
    CHECK(back.grid.pad[0] == 2);
    CHECK_FALSE(back.grid.periodic[0]);
    for (std::size_t p = 0; p < im.points.size(); ++p) {
      CHECK(back.points[p].z == im.points[p].z);
    }
  }
  SUBCASE("cylinder deck shift survives") {
    Immersion im = make_cylinder(1.0, 2.5, 16, 16);
    write_mesh_snapshot(dir / "cy.txt", im);
    Immersion back = read_mesh_snapshot(dir / "cy.txt");
    CHECK(back.grid.wrap_shift[1].z == im.grid.wrap_shift[1].z);
  }
}

TEST_CASE("format_double round-trips at 17 significant digits") {
  for (double v : {std::numbers::pi, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.1}) {
    const std::string s = format_double(v, 17);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv writer: header-only file for an empty trajectory") {
  const fs::path dir = temp_dir("csv");
  { CsvWriter w(dir / "empty.csv", "t,quantity,value"); }
  CHECK(slurp(dir / "empty.csv") == "t,quantity,value\n");
}

TEST_CASE("oracle experiment is deterministic byte for byte") {
  SimConfig cfg;
  cfg.experiment = "oracle";
  const fs::path d1 = temp_dir("det1");
  const fs::path d2 = temp_dir("det2");
  cfg.output_dir = d1.string();
  ExperimentResult r1 = run_oracle(cfg);
  cfg.output_dir = d2.string();
  ExperimentResult r2 = run_oracle(cfg);
  CHECK(r1.exit_code == 2);  // collapse is the expected outcome
  CHECK(r2.exit_code == 2);
  CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK_FALSE(slurp(d1 / "trajectory.csv").empty());
}

TEST_CASE("simulate writes a monotone r_mean column for a circle at rest") {
  SimConfig cfg;
  cfg.experiment = "simulate";
  cfg.geometry = "circle";
  cfg.n1 = 64;
  cfg.t_end = 0.5;
  const fs::path dir = temp_dir("sim");
  cfg.output_dir = dir.string();
  ExperimentResult res = run_simulate(cfg);
  CHECK(res.exit_code == 0);  // t_end well before collapse

  std::ifstream in(dir / "trajectory.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,quantity,value");
  double prev = 2.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (line.substr(c1 + 1, c2 - c1 - 1) != "r_mean") continue;
    const double v = std::strtod(line.c_str() + c2 + 1, nullptr);
    CHECK(v < prev);
    prev = v;
    ++rows;
  }
  CHECK(rows >= 3);
  CHECK(fs::exists(dir / "mesh_initial.txt"));
  CHECK(fs::exists(dir / "mesh_final.txt"));
}

#ifdef HMCF_BIN
TEST_CASE("command line: exit codes and strict config handling") {
  const fs::path dir = temp_dir("cli");
  const std::string bin = HMCF_BIN;
  auto shell = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  SUBCASE("oracle collapses: exit 2, outputs written") {
    const int code = shell("oracle --set output_dir=" + (dir / "o").string());
    CHECK(code == 2);
    CHECK(fs::exists(dir / "o" / "summary.csv"));
  }
  SUBCASE("simulate blow-up threshold: exit 3") {
    const int code = shell("simulate --set n1=64 --set h_max=3 --set output_dir=" +
                           (dir / "b").string());
    CHECK(code == 3);
  }
  SUBCASE("bad config file: exit 64 with messages") {
    std::ofstream(dir / "bad.cfg") << "cfl_safety = 7\nwhat = ever\n";
    const int code = shell("oracle --config " + (dir / "bad.cfg").string());
    CHECK(code == 64);
    const std::string err = slurp(dir / "stderr.txt");
    CHECK(err.find("cfl_safety") != std::string::npos);
    CHECK(err.find("what") != std::string::npos);
  }
  SUBCASE("experiment/subcommand mismatch: exit 64") {
    std::ofstream(dir / "mix.cfg") << "experiment = oracle\n";
    const int code = shell("simulate --config " + (dir / "mix.cfg").string());
    CHECK(code == 64);
  }
  SUBCASE("stability runs clean: exit 0") {
    const int code = shell(
        "stability --set geometry=graph --set n1=32 --set horizon=0.2 --set output_dir=" +
        (dir / "st").string());
    CHECK(code == 0);
    CHECK(fs::exists(dir / "st" / "stability.csv"));
  }
}
#endif
