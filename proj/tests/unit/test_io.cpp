#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cdrops/io.hpp"

using namespace cdrops;
using cdrops::io::Json;

namespace {

std::string error_of(const Json& j) {
  try {
    io::shape_from_json(j);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shapes round trip") {
  FourierCurve c = FourierCurve::circle(1.3, {0.5, -0.25, 0.0}, 3, 512);
  c.a[0] = -0.01;
  c.a[2] = 0.07;
  c.b[3] = -0.02;
  Configuration cfg;
  cfg.components.push_back({Ball{2, {0, 0, 0}, 1.0}, {Ball{2, {0.1, 0, 0}, 0.3}}});
  cfg.components.push_back({c, {}});
  cfg.components.back().outer = FourierCurve::circle(1.0, {5, 0, 0}, 3, 512);
  const Shape shapes[] = {Ball{2, {1, 2, 0}, 0.5}, Ball{3, {1, 2, 3}, 2.0}, AnnulusSpec{2, 0.4, 1.1, {0.1, 0.2, 0}},
                          AnnulusSpec{3, 1.0, 2.0, {}}, c, cfg};
  for (const Shape& s : shapes) {
    const Json j = io::to_json(s);
    const Shape back = io::shape_from_json(io::parse(j.dump(), "shape"));
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK(back.index() == s.index());
  }
}

TEST_CASE("readers name the bad field") {
  CHECK(error_of(Json::parse(R"({"dim": 2, "center": [0, 0], "radius": 1, "colour": 3})")).find("colour") !=
        std::string::npos);
  CHECK(error_of(Json::parse(R"({"dim": 2, "center": [0, 0], "radius": "one"})")).find("shape.radius") !=
        std::string::npos);
  CHECK(error_of(Json::parse(R"({"dim": 4, "center": [0, 0], "radius": 1})")).find("shape.dim") != std::string::npos);
  CHECK(error_of(Json::parse(R"({"dim": 2, "center": [0, 0, 0], "radius": 1})")).find("shape.center") !=
        std::string::npos);
  CHECK(error_of(Json::parse(R"({"dim": 2, "r_in": 2, "r_out": 1})")) != "");
  CHECK(error_of(Json::parse(
            R"({"dim": 2, "center": [0, 0], "base_radius": 1, "coeffs": {"a0": 0, "a": [0.1], "b": []}})"))
            .find("shape.coeffs.b") != std::string::npos);
  CHECK(error_of(Json::parse(R"([1, 2])")) != "");
  CHECK_THROWS_AS(io::parse("{\"dim\": 2,", "shape.json"), InvalidInput);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/shape.json"), InvalidInput);
}

TEST_CASE("job files") {
  const io::ScanJob scan = io::scan_job_from_json(Json::parse(
      R"({"lambda_min": 0.1, "lambda_max": 2, "Q_min": 1e-3, "Q_max": 10, "n_lambda": 3, "n_Q": 2,
          "alpha": 1.2, "threads": 1, "search": {"n_max": 8}, "csv": "x.csv"})"));
  CHECK(scan.config.n_lambda == 3);
  CHECK(scan.config.alpha == 1.2);
  CHECK(scan.config.search.n_max == 8);
  CHECK(scan.csv_path == "x.csv");
  CHECK(scan.svg_path.empty());
  CHECK_THROWS_AS(io::scan_job_from_json(Json::parse(R"({"n_lambda": 0})")), InvalidInput);
  CHECK_THROWS_AS(io::scan_job_from_json(Json::parse(R"({"search": {"nmax": 3}})")), InvalidInput);

  const io::StabilityJob st = io::stability_job_from_json(Json::parse(R"({"trials": 12, "seed": 5, "norms": [0.02]})"));
  CHECK(st.config.trials == 12);
  CHECK(st.config.seed == 5u);
  CHECK(st.config.norms == std::vector<double>{0.02});

  const io::MinimizeJob mj = io::minimize_job_from_json(Json::parse(R"({
      "shape": {"outer": {"dim": 2, "center": [0, 0], "base_radius": 1.5, "coeffs": {"a0": 0, "a": [0, 0], "b": [0, 0]}},
                "inner": {"dim": 2, "center": [0, 0], "base_radius": 0.6, "coeffs": {"a0": 0, "a": [0, 0], "b": [0, 0]}},
                "offset": [0.1, 0]},
      "lambda": 1, "Q": 0.5, "alpha": 1, "budget": {"max_iterations": 7, "round_boundaries": true}})"));
  CHECK(mj.shape.topology == optim::Topology::Annulus);
  CHECK(mj.shape.offset.x == 0.1);
  CHECK(mj.params.Q == 0.5);
  CHECK(mj.budget.max_iterations == 7);
  CHECK(mj.budget.round_boundaries);
  CHECK_THROWS_AS(io::minimize_job_from_json(Json::parse(R"({"shape": {"dim": 2, "center": [0, 0], "radius": 1}, "lambda": 1})")),
                  InvalidInput);
}

TEST_CASE("reports serialize") {
  EnergyReport r;
  r.lambda = 1.0;
  r.perimeter_raw = kTwoPi;
  r.bending_term = kTwoPi;
  r.total = 4 * kPi;
  r.riesz_error_estimate = std::nan("");
  r.method = "closed-form";
  const Json j = io::to_json(r);
  for (const char* key : {"perimeter", "bending", "riesz", "total", "riesz_error", "method"}) CHECK(j.contains(key));
  CHECK(j["riesz_error"].is_null());
  CHECK(j["total"].get<double>() == 4 * kPi);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "cdrops_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto target = dir / "out.csv";
  io::write_file_atomic(target.string(), "first\n");
  io::write_file_atomic(target.string(), "second\n");
  CHECK(slurp(target) == "second\n");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  CHECK_THROWS_AS(io::write_file_atomic((dir / "missing" / "x.csv").string(), "x"), InvalidInput);
  std::filesystem::remove_all(dir);
}
