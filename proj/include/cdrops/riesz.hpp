#pragma once

#include <cstdint>
#include <functional>

#include "cdrops/params.hpp"
#include "cdrops/types.hpp"

namespace cdrops {

/// Riesz energy estimate with a one-sigma style error bar.
struct RieszResult {
  double value = 0.0;
  double error = 0.0;
  const char* method = "";
};

namespace riesz {

/// |B_a(0) cap B_b(c e_1)| in dimension 2 or 3.
double lens_volume(int dim, double a, double b, double c);

/// V_alpha(B_R(0) minus B_r(offset)) by integrating |x|^(alpha-d) against the
/// set covariogram. r = 0 gives the ball. The error is the difference between
/// two Gauss orders; skipped (set to 0) when `with_error` is false.
RieszResult annulus_covariogram(int dim, double alpha, double r_out, double r_in, Point offset,
                                const QuadratureControls& quad, bool with_error = true);

inline RieszResult ball(int dim, double alpha, double R, const QuadratureControls& quad, bool with_error = true) {
  return annulus_covariogram(dim, alpha, R, 0.0, Point{}, quad, with_error);
}

/// Angular kernel I_d(a, b): integral of |a e - b w|^(alpha-d) over w in the unit sphere.
double angular_kernel(int dim, double alpha, double a, double b);

/// Centered annulus (or ball when r_in = 0) through the angular kernel double integral.
RieszResult annulus_kernel(int dim, double alpha, double r_out, double r_in, const QuadratureControls& quad);

/// Importance-sampled Monte Carlo estimate of V_alpha(E). `inside` is the
/// membership test, E lies in the ball of radius `radius` about `center`, and
/// `volume` is |E|. The error is the standard error.
RieszResult monte_carlo(const std::function<bool(const Point&)>& inside, int dim, double volume, Point center,
                        double radius, double alpha, long long samples, std::uint64_t seed);

}  // namespace riesz
}  // namespace cdrops
