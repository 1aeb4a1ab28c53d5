#pragma once

#include "cdrops/params.hpp"

// Unit-area planar annuli A_r = B_{sqrt(1+r^2)} minus B_r and their charged
// counterparts.

namespace cdrops::annulus {

/// 2 pi [lambda (r + sqrt(1+r^2)) + 1/r + 1/sqrt(1+r^2)]
double f_lambda(double lambda, double r);
double df_lambda(double lambda, double r);
double d2f_lambda(double lambda, double r);

/// lambda (1 + r/sqrt(1+r^2)) - 1/r^2 - r/(1+r^2)^(3/2), i.e. f'/(2 pi).
double euler_lagrange(double lambda, double r);

/// Minimizer of f_lambda by bisection on the Euler-Lagrange equation.
double r_lambda(double lambda);
/// Same minimizer through the root U > 1 of U^4 - U^3 - lambda U^2 + U - 1.
double r_lambda_quartic(double lambda);

/// V_alpha of the centered unit-area annulus with inner radius r (memoized).
double g_riesz(double r, double alpha, const QuadratureControls& quad = {});
/// Drop memoized values (tests).
void clear_g_cache();

struct OptimalAnnulus {
  double r_star = 0.0;
  double lambda = 0.0;
  double Q = 0.0;
  double alpha = 1.0;
  double energy = 0.0;       // h(r_star) = f_lambda + Q g
  double shift = 0.0;        // r_star - r_lambda
  double r_lambda = 0.0;
  double derivative = 0.0;   // h'(r_star), five-point differences
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Golden-section minimization of f_lambda + Q g on a bracket grown around
/// r_lambda, polished by Newton and checked by |h'(r)| r <= 1e-5 h(r).
OptimalAnnulus optimal_charged_annulus(double lambda, double Q, double alpha, const QuadratureControls& quad = {});

struct ShellRate {
  double value = 0.0;  // V_alpha(B_1 minus B_{1-eps})
  double error = 0.0;
  double rate = 0.0;   // eps^2, eps^2 |ln eps| or eps^(1+alpha)
};

ShellRate shell_riesz_rate(double epsilon, double alpha, int dim, const QuadratureControls& quad = {});

/// eps^2 for alpha > 1, eps^2 |ln eps| for alpha = 1, eps^(1+alpha) for alpha < 1.
double shell_rate_envelope(double epsilon, double alpha);

/// Thickness h of the 3D shell B_{R+h} minus B_R of volume |B_1| / n.
double shell_thickness_3d(double R, double n = 1.0);

}  // namespace cdrops::annulus
