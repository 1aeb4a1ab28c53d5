#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdrops/params.hpp"

namespace cdrops::phase {

/// G(lambda) = 2 pi (lambda + 1) - f_lambda(r_lambda): ball minus best annulus at Q = 0.
double ball_annulus_gap(double lambda);

struct ThresholdResult {
  double lambda_bar = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  double residual = 0.0;  // |G(lambda_bar)|
  int iterations = 0;
};

/// Root of the decreasing gap function on (eps, sqrt(2)/2] by bisection.
ThresholdResult lambda_bar(double tolerance = 1e-12);

/// lambda_bar at full precision, computed once per process.
double lambda_bar_value();

enum class Region { Ball, Annulus, NonexistenceCertified, Unknown };
const char* region_name(Region r);

struct Competitor {
  int N = 0;
  double R = 0.0;
  double energy = 0.0;
  double error = 0.0;
  bool found() const { return N > 0; }
};

struct Certificate {
  bool certified = false;
  Competitor witness;
  double lower_bound = 0.0;
  double margin = 0.0;  // lower_bound - (energy + error); positive when certified
  int evaluated = 0;    // Riesz evaluations spent by the search
};

struct SearchOptions {
  int n_max = 64;
  int r_points = 32;
  double r_span = 8.0;  // the log grid covers [seed / span, seed * span]
};

/// min over d >= 2 of 2 lambda d + 4 pi / d + Q pi^2 d^(alpha-2), shaved by the
/// golden-section tolerance so the result stays a lower bound.
double connected_lower_bound_2d(double lambda, double Q, double alpha);

/// min over d >= 2 of max(pi sqrt(lambda) d, 4 pi (1 + lambda)) + Q (4 pi / 3)^2 d^(alpha-3).
double connected_lower_bound_3d(double lambda, double Q, double alpha);

/// N far-apart annuli of outer radius R, each of area pi / N. The error covers
/// the Riesz quadrature only.
Competitor competitor_multi_annuli_2d(int N, double R, double lambda, double Q, double alpha,
                                      const QuadratureControls& quad = {});

/// N far-apart spherical shells with inner radius R, each of volume |B_1| / N.
Competitor competitor_multi_shells_3d(int N, double R, double lambda, double Q, double alpha,
                                      const QuadratureControls& quad = {});

/// Best multi-annulus competitor over the (N, R) search grid.
Competitor best_competitor_2d(double lambda, double Q, double alpha, const SearchOptions& opts = {},
                              const QuadratureControls& quad = {}, int* evaluated = nullptr);

Certificate nonexistence_certificate_2d(double lambda, double Q, double alpha, const SearchOptions& opts = {},
                                        const QuadratureControls& quad = {});
Certificate nonexistence_certificate_3d(double lambda, double Q, double alpha, const SearchOptions& opts = {},
                                        const QuadratureControls& quad = {});

struct PhaseCell {
  double lambda = 0.0;
  double Q = 0.0;
  double alpha = 1.0;
  int dim = 2;
  double ball_energy = 0.0;
  double ball_error = 0.0;
  double annulus_energy = 0.0;
  double annulus_r = 0.0;
  double annulus_error = 0.0;
  Competitor best_competitor;
  double connected_lower_bound = 0.0;
  Region classification = Region::Unknown;
  // Which hypotheses of the known sufficient conditions hold. The constants
  // in front of the envelopes are unknown, so only the scaled charges are kept.
  bool lambda_above_bar = false;
  double q_over_ball_envelope = 0.0;        // Q / (lambda - lambda_bar), lambda > lambda_bar
  double q_over_annulus_envelope = 0.0;     // Q / lambda^((3 + alpha) / 2)
  double q_over_nonexist_envelope = 0.0;    // Q / (lambda + lambda^((alpha - 1) / 2))
  std::string note;                         // set when the cell failed
};

PhaseCell classify_cell(double lambda, double Q, double alpha, const SearchOptions& opts = {},
                        const QuadratureControls& quad = {});

struct ScanConfig {
  double lambda_min = 1e-3;
  double lambda_max = 10.0;
  double Q_min = 1e-4;
  double Q_max = 1e6;
  int n_lambda = 16;
  int n_Q = 16;
  double alpha = 1.5;
  int threads = 0;  // 0: CHARGED_DROPS_THREADS or the hardware count
  SearchOptions search{};
  QuadratureControls quad{};

  void validate() const;
};

/// Log-spaced grid value i of n on [lo, hi].
double log_grid(double lo, double hi, int i, int n);

/// Cells in row-major order: lambda index outer, Q index inner. Failed cells
/// come back as Unknown with a note.
std::vector<PhaseCell> scan(const ScanConfig& config);

/// Worker count from the request, CHARGED_DROPS_THREADS, and the hardware.
int resolve_threads(int requested);

std::string scan_csv(const std::vector<PhaseCell>& cells);
std::string scan_svg(const std::vector<PhaseCell>& cells, const ScanConfig& config);

struct MassMapEntry {
  double mass = 0.0;
  double lambda = 0.0;  // rescaled parameters at unit-ball area
  double Q = 0.0;
  double prefactor = 0.0;
  PhaseCell cell;
};

/// Classification of F_{lambda,Q} at mass m for each requested mass.
std::vector<MassMapEntry> mass_map(double lambda, double Q, double alpha, const std::vector<double>& masses,
                                   const SearchOptions& opts = {}, const QuadratureControls& quad = {});

}  // namespace cdrops::phase
