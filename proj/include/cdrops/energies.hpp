#pragma once

#include <string>

#include "cdrops/geometry.hpp"
#include "cdrops/params.hpp"
#include "cdrops/riesz.hpp"

namespace cdrops {

enum class RieszMethod { Auto, Radial, RadialKernel, Cell, MonteCarlo };

/// "auto", "radial", "radial-kernel", "cell", "monte-carlo".
RieszMethod parse_riesz_method(const std::string& name);

/// Integral of the squared curvature along the curve.
double elastica_energy(const FourierCurve& curve);

/// Willmore energy of 3D balls (4 pi) and spherical shells (8 pi); rejects planar shapes.
double willmore_closed(const Shape& shape);

/// Elastica in 2D, Willmore in 3D, summed over all boundaries.
double bending_energy(const Shape& shape);

/// V_alpha(shape) with an error estimate; Auto picks radial quadrature for
/// balls and annuli, cell quadrature for other planar shapes and Monte Carlo
/// for other 3D configurations.
RieszResult riesz_energy(const Shape& shape, const EnergyParams& params, RieszMethod method = RieszMethod::Auto);

struct EnergyReport {
  double lambda = 0.0;
  double Q = 0.0;
  double perimeter_raw = 0.0;  // P(E)
  double riesz_raw = 0.0;      // V_alpha(E)
  double perimeter_term = 0.0;  // lambda P
  double bending_term = 0.0;
  double riesz_term = 0.0;  // Q V
  double total = 0.0;
  double riesz_error_estimate = 0.0;  // on V_alpha, not scaled by Q
  std::string method;
};

EnergyReport total_energy(const Shape& shape, const EnergyParams& params, RieszMethod method = RieszMethod::Auto);

}  // namespace cdrops
