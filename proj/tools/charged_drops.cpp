// charged-drops: command-line front end. Every command parses its inputs,
// calls one library entry point and prints JSON; numerics live in the library.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cdrops/annulus.hpp"
#include "cdrops/energies.hpp"
#include "cdrops/io.hpp"
#include "cdrops/optimizer.hpp"
#include "cdrops/phase_diagram.hpp"
#include "cdrops/stability.hpp"
#include "cdrops/types.hpp"

namespace {

using cdrops::io::Json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBudget = 4;

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

void write_output(const std::string& path, const std::string& content) {
  if (!path.empty()) cdrops::io::write_file_atomic(path, content);
}

struct Options {
  // energy
  std::string shape_path;
  std::string method = "auto";
  double lambda = 0.0;
  double Q = 0.0;
  double alpha = 1.0;
  int dim = 2;
  // lambda-bar
  double tol = 1e-12;
  // config-driven commands
  std::string config;
  std::string csv;
  std::string svg;
  long long seed = -1;
  int threads = -1;
  int max_iterations = -1;
  std::vector<double> masses;
};

int run_energy(const Options& o) {
  const cdrops::Shape shape = cdrops::io::shape_from_json(cdrops::io::read_json_file(o.shape_path));
  cdrops::EnergyParams p;
  p.lambda = o.lambda;
  p.Q = o.Q;
  p.alpha = o.alpha;
  p.dim = o.dim;
  p.validate();
  cdrops::require(cdrops::shape_dim(shape) == o.dim,
                  "--dim " + std::to_string(o.dim) + " does not match the shape dimension " +
                      std::to_string(cdrops::shape_dim(shape)));
  emit(cdrops::io::to_json(cdrops::total_energy(shape, p, cdrops::parse_riesz_method(o.method))));
  return 0;
}

int run_lambda_bar(const Options& o) {
  emit(cdrops::io::to_json(cdrops::phase::lambda_bar(o.tol)));
  return 0;
}

int run_annulus(const Options& o) {
  emit(cdrops::io::to_json(cdrops::annulus::optimal_charged_annulus(o.lambda, o.Q, o.alpha)));
  return 0;
}

int run_phase_diagram(const Options& o) {
  cdrops::io::ScanJob job = cdrops::io::scan_job_from_json(cdrops::io::read_json_file(o.config));
  if (!o.csv.empty()) job.csv_path = o.csv;
  if (!o.svg.empty()) job.svg_path = o.svg;
  if (o.threads >= 0) job.config.threads = o.threads;
  const auto cells = cdrops::phase::scan(job.config);
  // Written before any summary so that partial (UNKNOWN) results survive.
  write_output(job.csv_path, cdrops::phase::scan_csv(cells));
  write_output(job.svg_path, cdrops::phase::scan_svg(cells, job.config));
  std::map<std::string, int> counts;
  for (const auto& c : cells) ++counts[cdrops::phase::region_name(c.classification)];
  Json summary{{"cells", cells.size()}, {"counts", counts}, {"csv", job.csv_path}, {"svg", job.svg_path}};
  emit(summary);
  return 0;
}

int run_stability(const Options& o) {
  cdrops::io::StabilityJob job;
  if (!o.config.empty()) job = cdrops::io::stability_job_from_json(cdrops::io::read_json_file(o.config));
  if (o.seed >= 0) job.config.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.csv.empty()) job.csv_path = o.csv;
  const auto e = cdrops::stability::deficit_experiment(job.config);
  write_output(job.csv_path, cdrops::stability::deficit_csv(e.samples));
  Json out = cdrops::io::to_json(e);
  out["seed"] = job.config.seed;
  emit(out);
  return 0;
}

int run_minimize(const Options& o) {
  cdrops::io::MinimizeJob job = cdrops::io::minimize_job_from_json(cdrops::io::read_json_file(o.config));
  if (o.max_iterations >= 0) job.budget.max_iterations = o.max_iterations;
  const auto r = cdrops::optim::minimize(job.shape, job.params, job.budget);
  write_output(o.csv.empty() ? job.trajectory_path : o.csv, cdrops::optim::trajectory_csv(r.trajectory));
  emit(cdrops::io::to_json(r));
  return r.converged ? 0 : kExitBudget;
}

int run_nonexist(const Options& o) {
  cdrops::require(o.dim == 2 || o.dim == 3, "--dim must be 2 or 3");
  const auto c = o.dim == 2 ? cdrops::phase::nonexistence_certificate_2d(o.lambda, o.Q, o.alpha)
                            : cdrops::phase::nonexistence_certificate_3d(o.lambda, o.Q, o.alpha);
  Json out = cdrops::io::to_json(c);
  out["lambda"] = o.lambda;
  out["Q"] = o.Q;
  out["alpha"] = o.alpha;
  out["dim"] = o.dim;
  emit(out);
  return 0;
}

int run_mass_map(const Options& o) {
  Json out = Json::array();
  for (const auto& e : cdrops::phase::mass_map(o.lambda, o.Q, o.alpha, o.masses)) out.push_back(cdrops::io::to_json(e));
  emit(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perimeter + elastica + Riesz energies of planar and spatial drops"};
  app.require_subcommand(1);
  Options o;

  auto* energy = app.add_subcommand("energy", "Energy report for a shape file");
  energy->add_option("--shape", o.shape_path, "Shape JSON")->required();
  energy->add_option("--lambda", o.lambda)->required();
  energy->add_option("--Q", o.Q);
  energy->add_option("--alpha", o.alpha);
  energy->add_option("--dim", o.dim);
  energy->add_option("--method", o.method, "auto, radial, radial-kernel, cell, monte-carlo");

  auto* lbar = app.add_subcommand("lambda-bar", "Ball/annulus threshold at zero charge");
  lbar->add_option("--tol", o.tol);

  auto* ann = app.add_subcommand("annulus", "Optimal centered annulus of unit-disk area");
  ann->add_option("--lambda", o.lambda)->required();
  ann->add_option("--Q", o.Q);
  ann->add_option("--alpha", o.alpha);

  auto* pd = app.add_subcommand("phase-diagram", "Scan of the (lambda, Q) plane");
  pd->add_option("--config", o.config, "Scan JSON")->required();
  pd->add_option("--csv", o.csv);
  pd->add_option("--svg", o.svg);
  pd->add_option("--threads", o.threads);

  auto* st = app.add_subcommand("stability", "Elastica deficit of random nearly round sets");
  st->add_option("--config", o.config);
  st->add_option("--seed", o.seed);
  st->add_option("--csv", o.csv);

  auto* mn = app.add_subcommand("minimize", "Gradient descent at fixed area and topology");
  mn->add_option("--config", o.config, "Minimization JSON")->required();
  mn->add_option("--csv", o.csv, "Trajectory CSV");
  mn->add_option("--max-iterations", o.max_iterations, "Override the iteration budget");

  auto* ne = app.add_subcommand("nonexist", "Disconnected competitor below the connected lower bound");
  ne->add_option("--lambda", o.lambda)->required();
  ne->add_option("--Q", o.Q)->required();
  ne->add_option("--alpha", o.alpha)->required();
  ne->add_option("--dim", o.dim);

  auto* mm = app.add_subcommand("mass-map", "Classification at other masses");
  mm->add_option("--lambda", o.lambda)->required();
  mm->add_option("--Q", o.Q)->required();
  mm->add_option("--alpha", o.alpha)->required();
  mm->add_option("--masses", o.masses)->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*energy) return run_energy(o);
    if (*lbar) return run_lambda_bar(o);
    if (*ann) return run_annulus(o);
    if (*pd) return run_phase_diagram(o);
    if (*st) return run_stability(o);
    if (*mn) return run_minimize(o);
    if (*ne) return run_nonexist(o);
    if (*mm) return run_mass_map(o);
  } catch (const cdrops::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const cdrops::NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const cdrops::BudgetExhausted& e) {
    std::fprintf(stderr, "budget exhausted: %s\n", e.what());
    return kExitBudget;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitInput;
}
