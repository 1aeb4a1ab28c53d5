#pragma once

#include <string>
#include <vector>

#include "cdrops/geometry.hpp"
#include "cdrops/params.hpp"

// Projected gradient descent for F = lambda P + W + Q V_alpha over radial
// graphs at area pi. The topology is fixed by the initial shape.

namespace cdrops::optim {

enum class Topology { Ball, Annulus };

/// One curve (ball topology) or an outer curve with a hole whose center sits
/// at `offset` from the outer center (annulus topology).
struct OptimShape {
  Topology topology = Topology::Ball;
  FourierCurve outer;
  FourierCurve inner;
  Point offset{};

  void validate() const;
  /// The same region as a Configuration, for the energies module.
  Configuration configuration() const;
};

struct OptimBudget {
  int max_iterations = 500;
  double grad_tol = 1e-8;
  double initial_step = 1.0;
  double max_step = 64.0;
  int max_halvings = 60;
  double fd_step = 1e-6;          // Riesz finite differences, per coefficient
  double min_gap = 1e-3;          // inner curve stays min_gap * outer radius inside the outer one
  int cells_across_gap = 4;       // lattice spacing <= gap / cells_across_gap
  int lbfgs_memory = 8;           // 0: preconditioned steepest descent
  bool round_boundaries = false;  // freeze every mode k >= 1; only the hole radius and offset move
};

struct OptimState {
  OptimShape shape;  // physical: area pi
  EnergyParams params;
  double step = 0.0;
  double energy = 0.0;
  int iteration = 0;
  double grad_norm = 0.0;
};

struct TrajectoryPoint {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double offset = 0.0;  // |offset| (annulus topology)
};

struct OptimResult {
  OptimState final_state;
  std::vector<TrajectoryPoint> trajectory;
  bool converged = false;
  std::string stop_reason;          // "gradient", "stalled" or "budget"
  std::string classification_hint;  // "ball" or "centered annulus"
  double distance_to_primitive = 0.0;
  int rejected_steps = 0;           // trial steps that broke graph validity or nesting
  double cell_spacing = 0.0;        // lattice spacing of the Riesz term (unit frame)
};

OptimResult minimize_ball_topology(const FourierCurve& init, const EnergyParams& params, const OptimBudget& budget = {});

OptimResult minimize_annulus_topology(const FourierCurve& outer, const FourierCurve& inner, Point offset,
                                      const EnergyParams& params, const OptimBudget& budget = {});

OptimResult minimize(const OptimShape& init, const EnergyParams& params, const OptimBudget& budget = {});

/// Analytic gradients of perimeter and elastica against central differences
/// with step 1e-6; the largest component discrepancy divided by the largest
/// gradient component (floored at 1e-3 so flat points do not divide by zero).
double gradient_check(const OptimShape& shape, double fd_step = 1e-6);

/// Largest |component| of the perimeter and elastica gradients over the shape
/// coefficients, excluding the scale mode a_0.
double shape_gradient_max(const OptimShape& shape);

/// Smallest radial distance from the inner curve to the outer one, measured
/// along rays from the outer center.
double nesting_gap(const OptimShape& shape);

/// Mean radius of the hole in the physical frame.
double inner_mean_radius(const OptimShape& shape);

std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory);

}  // namespace cdrops::optim
