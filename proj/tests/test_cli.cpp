#include <filesystem>
#include <fstream>
#include <sstream>

#include "confkit/cli.hpp"
#include "confkit/error.hpp"
#include "doctest.h"

using namespace confkit;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "confkit_cli_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("list-maps emits the registry") {
  const auto r = cli({"list-maps"});
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j.is_array());
  bool found = false;
  for (const auto& e : j) found = found || e["name"] == "ortho_proj";
  CHECK(found);
}

TEST_CASE("analyze-map reports K_max = 1 for the projection") {
  const auto r = cli({"analyze-map", "--map", "ortho_proj:3,2", "--samples", "100", "--seed", "7"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(std::abs(j["K_max"].get<double>() - 1.0) <= 1e-9);
  CHECK(j["samples"] == 100);
  CHECK(j["rank_deficient_count"] == 0);

  const Json t = Json::parse(cli({"analyze-map", "--map", "torus_fold", "--samples", "50"}).out);
  CHECK(t["K_max"] == "inf");
  CHECK(t["classification"] == "rank-deficient");
}

TEST_CASE("holonomy of the contact coframe on a 2 x 3 rectangle") {
  const auto r = cli({"holonomy", "--coframe", "contact:0.1", "--loop", "rect:0,0,2,3"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  // Green's theorem: Δz = −ε · area.
  CHECK(j["fiber_defect"].get<double>() == doctest::Approx(-0.6).epsilon(1e-3));
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"no-such-command"}).code == 1);
  CHECK(cli({"analyze-map", "--map", "ortho_proj", "--bogus"}).code == 1);
  const auto bad_map = cli({"analyze-map", "--map", "nope"});
  CHECK(bad_map.code == 2);
  CHECK(bad_map.err.find("NotFound") != std::string::npos);
  CHECK(cli({"holonomy", "--map", "ortho_proj", "--loop", "rect:0,0,1,1"}).code == 2);
  CHECK(cli({"lift-path", "--coframe", "flat", "--path", "spiral:1", "--start", "0,0,0"}).code == 2);
}

TEST_CASE("seeded runs are byte-identical") {
  const std::vector<std::string> args{"analyze-map", "--map", "hopf_derived", "--samples", "300",
                                      "--seed", "11", "--box", "-3,3"};
  auto a1 = args, a2 = args, a4 = args;
  a1.insert(a1.end(), {"--threads", "1"});
  a2.insert(a2.end(), {"--threads", "1"});
  a4.insert(a4.end(), {"--threads", "4"});
  const auto r1 = cli(a1), r2 = cli(a2), r4 = cli(a4);
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out == r4.out);
  const auto other = cli({"analyze-map", "--map", "hopf_derived", "--samples", "300", "--seed", "12", "--box", "-3,3"});
  CHECK(other.out != r1.out);
}

TEST_CASE("staircase file round trip through area-growth and modulus") {
  const std::string surface = temp_file("strip.json");
  const auto b = cli({"build-staircase", "--map", "ortho_proj:3,2", "--segment", "0,0,2,0", "--start", "0,0,0.5",
                      "--height", "2", "--n-along", "9", "--n-up", "5", "--out", surface});
  REQUIRE(b.code == 0);
  const StaircaseSurface s = surface_from_json(read_json_file(surface));
  CHECK(s.status == "Completed");
  CHECK(s.h_infinity_up == doctest::Approx(2.0));
  // Serialization is lossless.
  CHECK(surface_to_json(s).dump() == read_json_file(surface).dump());

  const std::string csv = temp_file("growth.csv");
  const auto g = cli({"area-growth", "--surface", surface, "--radii", "0.5,1,1.5", "--out", csv});
  REQUIRE(g.code == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("r,L,A\r\n", 0) == 0);
  // The strip's balls around the whole segment: A = 2r, L = 2. The coarse
  // mesh overestimates A by a few percent.
  const auto row = text.find("\r\n1,2,");
  REQUIRE(row != std::string::npos);
  CHECK(std::stod(text.substr(row + 6)) == doctest::Approx(2.0).epsilon(0.03));

  const auto m = cli({"estimate-modulus", "--complex", surface, "--family", "lifted"});
  REQUIRE(m.code == 0);
  CHECK(Json::parse(m.out)["value"].get<double>() == doctest::Approx(1.0).epsilon(0.03));
  CHECK(cli({"estimate-modulus", "--complex", surface, "--family", "rect"}).code == 2);

  std::ofstream(temp_file("broken.json")) << "{\"format\": \"something else\"}";
  CHECK(cli({"area-growth", "--surface", temp_file("broken.json"), "--radii", "1"}).code == 2);
}

TEST_CASE("estimate-modulus on a grid") {
  const auto r = cli({"estimate-modulus", "--nx", "16", "--ny", "16", "--width", "2"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(0.5).epsilon(0.03));
  CHECK(j["bound"] == "UpperBound");
}

TEST_CASE("parabolicity table as CSV") {
  const auto r = cli({"parabolicity", "--cutoffs", "100,1000", "--alphas", "1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("alpha,alpha_is_minimal,cutoff,admissible,min_curve_length,m_upper\r\n", 0) == 0);
  CHECK(cli({"parabolicity", "--cutoffs", "100", "--alphas", "0"}).code == 2);
}

TEST_CASE("lift-path CSV columns") {
  const auto r = cli({"lift-path", "--coframe", "contact:0.1", "--path", "segment:0,0,1,1", "--start", "0,0,0",
                      "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,x1,x2,x3\r\n", 0) == 0);
}

TEST_CASE("config file supplies flags") {
  const std::string cfg = temp_file("analyze.toml");
  std::ofstream(cfg) << "[analyze-map]\nmap = \"ortho_proj:4,2\"\nsamples = 20\n";
  const auto r = cli({"--config", cfg, "analyze-map"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["source_dim"] == 4);
  CHECK(j["samples"] == 20);
}

TEST_CASE("demo-liouville paths") {
  const auto torus = cli({"demo-liouville", "--map", "torus_fold"});
  CHECK(torus.code == 2);
  CHECK(Json::parse(torus.out)["status"] == "rejected");

  const Json hopf = Json::parse(cli({"demo-liouville", "--map", "hopf_derived"}).out);
  CHECK(hopf["bounded_image"] == false);
  CHECK(hopf["verdict"].get<std::string>().rfind("hypothesis unmet", 0) == 0);

  const Json proj = Json::parse(cli({"demo-liouville", "--window", "3"}).out);
  CHECK(proj["M_image"].get<double>() > 0.0);
  CHECK(proj["M_lifted_decreasing"] == true);
  CHECK(proj["verdict"].get<std::string>().rfind("no contradiction expected", 0) == 0);
}

TEST_CASE("path micro-syntax") {
  CHECK(parse_path("rect:0,0,1,2").closed());
  CHECK(parse_path("circle:0,0,1").length() == doctest::Approx(2 * 3.141592653589793));
  CHECK(parse_path("polyline:0,0;1,0;1,1").length() == doctest::Approx(2.0));
  CHECK_THROWS_AS(parse_path("segment:0,0,1"), Error);
  CHECK_THROWS_AS(parse_path("nonsense"), Error);
}
