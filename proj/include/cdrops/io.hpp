#pragma once

#include <string>

#include "json.hpp"

#include "cdrops/annulus.hpp"
#include "cdrops/energies.hpp"
#include "cdrops/geometry.hpp"
#include "cdrops/optimizer.hpp"
#include "cdrops/phase_diagram.hpp"
#include "cdrops/stability.hpp"

// JSON documents for shapes, configs and reports. Readers reject unknown keys
// and name the offending field in the InvalidInput message.

namespace cdrops::io {

using Json = nlohmann::ordered_json;

/// Curve {dim, center, base_radius, coeffs: {a0, a, b}, n_samples?},
/// ball {dim, center, radius}, annulus {dim, r_in, r_out, offset},
/// configuration {dim, components: [{outer, holes}]}.
Shape shape_from_json(const Json& j);
Json to_json(const Shape& shape);
Json to_json(const FourierCurve& curve);

Json to_json(const EnergyReport& r);
Json to_json(const phase::ThresholdResult& r);
Json to_json(const annulus::OptimalAnnulus& r);
Json to_json(const phase::Competitor& c);
Json to_json(const phase::Certificate& c);
Json to_json(const phase::PhaseCell& c);
Json to_json(const phase::MassMapEntry& e);
Json to_json(const stability::DeficitExperiment& e);
Json to_json(const optim::OptimResult& r);

/// {lambda_min, lambda_max, Q_min, Q_max, n_lambda, n_Q, alpha, threads,
///  search: {n_max, r_points, r_span}, quad: {...}, csv, svg}
struct ScanJob {
  phase::ScanConfig config;
  std::string csv_path;
  std::string svg_path;
};
ScanJob scan_job_from_json(const Json& j);

/// {mode_min, mode_max, norms, trials, seed, n_samples, csv}
struct StabilityJob {
  stability::DeficitConfig config;
  std::string csv_path;
};
StabilityJob stability_job_from_json(const Json& j);

/// {shape: curve | {outer, inner, offset}, lambda, Q, alpha, quad, budget: {...}, trajectory_csv}
struct MinimizeJob {
  optim::OptimShape shape;
  EnergyParams params;
  optim::OptimBudget budget;
  std::string trajectory_path;
};
MinimizeJob minimize_job_from_json(const Json& j);

QuadratureControls quad_from_json(const Json& j);

Json parse(const std::string& text, const std::string& what);
Json read_json_file(const std::string& path);

/// Write through a temporary file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace cdrops::io
