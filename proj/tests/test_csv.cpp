#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "semilag/csv.hpp"
#include "semilag/error.hpp"

using namespace semilag;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "semilag_unit_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("csv numbers round-trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.7182818284590452, 1e-300, 3.0, 0.0,
                   0.15003495186341703}) {
    const std::string s = csv_double(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    // `.` decimal point regardless of locale, no comma inside a cell.
    REQUIRE(s.find(',') == std::string::npos);
  }
  REQUIRE(csv_double(1.0) == "1");
  REQUIRE(csv_double(0.5) == "0.5");
}

TEST_CASE("csv writer enforces the header width") {
  const auto path = temp_path("writer.csv");
  {
    CsvWriter w(path.string(), {"a", "b"});
    w.row({1.0, 2.5});
    REQUIRE_THROWS_AS(w.row({1.0}), ConfigError);
  }
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 2);
  REQUIRE(lines[0] == "a,b");
  REQUIRE(lines[1] == "1,2.5");
}

TEST_CASE("value and policy layers") {
  const Problem p = make_test1().problem;
  const Grid grid({0.0}, {1.0}, {3});
  const TimeGrid tg(0.0, 1.0, 1);
  const ValueField V{grid, tg, {{1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}}};

  const auto vpath = temp_path("value.csv");
  write_value_layer_csv(vpath.string(), V, 0);
  const auto vlines = read_lines(vpath);
  REQUIRE(vlines.size() == 4);
  REQUIRE(vlines[0] == "x1,value");
  REQUIRE(vlines[1] == "0,1");
  REQUIRE(vlines[2] == "0.5,2");
  REQUIRE(vlines[3] == "1,3");

  const ControlGrid controls = sample_control_grid(p, 3);
  const PolicyField P{grid, tg, controls, p, BoundaryPolicy::kClamp, {{2, 0, 1}}};
  const auto ppath = temp_path("policy.csv");
  write_policy_layer_csv(ppath.string(), P, 0);
  const auto plines = read_lines(ppath);
  REQUIRE(plines[0] == "x1,u1");
  REQUIRE(plines[1] == "0,1");    // argmin 2 -> control +1
  REQUIRE(plines[2] == "0.5,-1");
  REQUIRE(plines[3] == "1,0");
}

TEST_CASE("eoc table leaves the first ratio cell empty") {
  EocReport rep;
  rep.rows.push_back({0.1, 0.1, 0.5, std::nullopt});
  rep.rows.push_back({0.05, 0.05, 0.25, 1.0});
  const auto path = temp_path("eoc.csv");
  write_eoc_csv(path.string(), rep);
  const auto lines = read_lines(path);
  REQUIRE(lines[0] == "dt,dx,error,eoc");
  REQUIRE(lines[1].back() == ',');
  REQUIRE(lines[2] == "0.050000000000000003,0.050000000000000003,0.25,1");
}

TEST_CASE("trajectory rows end with empty control cells") {
  const Problem p = make_test2().problem;
  const TimeGrid tg(0.0, 1.0, 2);
  DiscreteTrajectory traj;
  traj.states = {Vec{0.0, 0.0}, Vec{0.5, 0.0}, Vec{1.0, 0.125}};
  traj.controls = {Vec{1.0}, Vec{1.0}};
  const auto path = temp_path("traj.csv");
  write_trajectory_csv(path.string(), p, traj, tg);
  const auto lines = read_lines(path);
  REQUIRE(lines[0] == "n,t,y1,y2,u1");
  REQUIRE(lines[1] == "0,0,0,0,1");
  REQUIRE(lines[2] == "1,0.5,0.5,0,1");
  REQUIRE(lines[3] == "2,1,1,0.125,");  // no control at the final level
}

TEST_CASE("lemma tables carry optional cells") {
  Lemma1Report l1;
  l1.bound_checked = true;
  l1.rows.push_back({0.1, 0.3, 0.01, 0.5, std::nullopt});
  l1.rows.push_back({0.05, 0.15, 0.005, 0.26, 2.0});
  const auto p1 = temp_path("lemma1.csv");
  write_lemma1_csv(p1.string(), l1);
  const auto lines1 = read_lines(p1);
  REQUIRE(lines1[0] == "dt,m_u,divergence,ratio,bound");
  REQUIRE(lines1[1] == "0.10000000000000001,0.29999999999999999,0.01,,0.5");
  REQUIRE(lines1[2] ==
          "0.050000000000000003,0.14999999999999999,0.0050000000000000001,2,"
          "0.26000000000000001");

  Lemma2Report l2;
  l2.rows.push_back({0.1, 0.1, 0.02, std::nullopt});
  const auto p2 = temp_path("lemma2.csv");
  write_lemma2_csv(p2.string(), l2);
  REQUIRE(read_lines(p2)[0] == "dt,dx,gap,ratio");

  HypothesisEstimates est;
  est.m_f = 1.5;
  const auto p3 = temp_path("audit.csv");
  write_audit_csv(p3.string(), est);
  const auto lines3 = read_lines(p3);
  REQUIRE(lines3.size() == 11);
  REQUIRE(lines3[0] == "constant,value");
  REQUIRE(lines3[1] == "m_f,1.5");
  REQUIRE(lines3[10] == "l_psi,0");
}
