#pragma once

#include <cstdint>

namespace cdrops {

/// Knobs shared by the Riesz quadrature routes.
struct QuadratureControls {
  int radial_order = 16;          // Gauss-Legendre points per graded panel
  int grading_levels = 10;        // geometric panels toward each breakpoint
  int angular_nodes = 64;         // polar Gauss nodes per component (cross terms)
  long long mc_samples = 1'000'000;
  std::uint64_t seed = 20240611;
  double target_rel_error = 1e-6;       // radial routes
  double cell_target_rel_error = 1e-3;  // cell quadrature
  int cells_per_radius = 40;
  long long max_cells = 60'000;
};

/// Parameters of F = lambda * P + W + Q * V_alpha in dimension `dim`.
struct EnergyParams {
  double lambda = 0.0;
  double Q = 0.0;
  double alpha = 1.0;
  int dim = 2;
  QuadratureControls quad{};

  void validate() const;
};

}  // namespace cdrops
