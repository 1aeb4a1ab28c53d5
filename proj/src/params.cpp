#include "cdrops/params.hpp"

#include <cmath>

#include "cdrops/types.hpp"

namespace cdrops {

void EnergyParams::validate() const {
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be finite and non-negative");
  require(std::isfinite(Q) && Q >= 0.0, "Q must be finite and non-negative");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < dim, "alpha must lie in (0, dim)");
  require(quad.radial_order >= 4, "radial_order too small");
  require(quad.grading_levels >= 1, "grading_levels must be positive");
  require(quad.angular_nodes >= 8, "angular_nodes too small");
  require(quad.mc_samples >= 1000, "mc_samples must be at least 1000");
  require(quad.target_rel_error > 0.0 && quad.cell_target_rel_error > 0.0, "target errors must be positive");
  require(quad.cells_per_radius >= 4, "cells_per_radius too small");
  require(quad.max_cells >= 256, "max_cells too small");
}

}  // namespace cdrops
