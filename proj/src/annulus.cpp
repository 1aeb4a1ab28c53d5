#include "cdrops/annulus.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "cdrops/riesz.hpp"
#include "cdrops/types.hpp"

namespace cdrops::annulus {

double f_lambda(double lambda, double r) {
  require(r > 0.0, "f_lambda needs r > 0");
  require(lambda >= 0.0, "lambda must be non-negative");
  const double s = std::sqrt(1.0 + r * r);
  return kTwoPi * (lambda * (r + s) + 1.0 / r + 1.0 / s);
}

double euler_lagrange(double lambda, double r) {
  const double s = std::sqrt(1.0 + r * r);
  return lambda * (1.0 + r / s) - 1.0 / (r * r) - r / (s * s * s);
}

double df_lambda(double lambda, double r) {
  require(r > 0.0, "f_lambda needs r > 0");
  return kTwoPi * euler_lagrange(lambda, r);
}

double d2f_lambda(double lambda, double r) {
  require(r > 0.0, "f_lambda needs r > 0");
  const double s2 = 1.0 + r * r;
  const double s = std::sqrt(s2);
  const double s3 = s2 * s;
  return kTwoPi * (lambda / s3 + 2.0 / (r * r * r) - (1.0 - 2.0 * r * r) / (s3 * s2));
}

double r_lambda(double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, "r_lambda needs lambda > 0");
  const double r0 = 1.0 / std::sqrt(lambda);
  double lo = r0 / 8.0;
  double hi = 8.0 * r0;
  int grow = 0;
  while (euler_lagrange(lambda, lo) > 0.0 && grow++ < 200) lo *= 0.5;
  while (euler_lagrange(lambda, hi) < 0.0 && grow++ < 400) hi *= 2.0;
  if (!(euler_lagrange(lambda, lo) <= 0.0 && euler_lagrange(lambda, hi) >= 0.0))
    throw NumericalFailure("r_lambda: failed to bracket the Euler-Lagrange root");
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (euler_lagrange(lambda, mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double r_lambda_quartic(double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, "r_lambda needs lambda > 0");
  // U = 1 + v keeps precision when U is close to 1 (small lambda):
  // q(v) = v^4 + 3v^3 + (3-lambda) v^2 + (2-2 lambda) v - lambda.
  auto q = [lambda](double v) { return (((v + 3.0) * v + (3.0 - lambda)) * v + (2.0 - 2.0 * lambda)) * v - lambda; };
  auto dq = [lambda](double v) { return ((4.0 * v + 9.0) * v + 2.0 * (3.0 - lambda)) * v + (2.0 - 2.0 * lambda); };
  double lo = 0.0;
  double hi = 1.0;
  while (q(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (q(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  double v = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = dq(v);
    if (d == 0.0) break;
    const double nv = v - q(v) / d;
    if (nv > lo * 0.5 && nv < hi * 2.0) v = nv;
  }
  return 1.0 / std::sqrt(v * (2.0 + v));
}

namespace {

std::mutex g_mutex;
// Keyed on exact inputs so cached values never depend on call order.
std::map<std::tuple<double, double, int, int, double>, double> g_cache;

}  // namespace

double g_riesz(double r, double alpha, const QuadratureControls& quad) {
  require(std::isfinite(r) && r > 0.0, "g needs r > 0");
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  const auto key = std::make_tuple(r, alpha, quad.radial_order, quad.grading_levels, quad.target_rel_error);
  {
    std::lock_guard lock(g_mutex);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second;
  }
  const double v = riesz::annulus_covariogram(2, alpha, std::sqrt(1.0 + r * r), r, Point{}, quad).value;
  {
    std::lock_guard lock(g_mutex);
    g_cache.emplace(key, v);
  }
  return v;
}

void clear_g_cache() {
  std::lock_guard lock(g_mutex);
  g_cache.clear();
}

OptimalAnnulus optimal_charged_annulus(double lambda, double Q, double alpha, const QuadratureControls& quad) {
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(Q) && Q >= 0.0, "Q must be non-negative");
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  OptimalAnnulus out;
  out.lambda = lambda;
  out.Q = Q;
  out.alpha = alpha;
  out.r_lambda = r_lambda(lambda);
  if (Q == 0.0) {
    out.r_star = out.r_lambda;
    out.energy = f_lambda(lambda, out.r_star);
    out.bracket_lo = out.bracket_hi = out.r_star;
    return out;
  }
  auto h = [&](double r) { return f_lambda(lambda, r) + Q * g_riesz(r, alpha, quad); };
  // Five-point stencil with a wide step: thin annuli carry quadrature noise
  // near 1e-8 relative, which a narrow stencil would amplify.
  auto dh = [&](double r) {
    const double d = 1e-2 * r;
    const double dg = (8.0 * (g_riesz(r + d, alpha, quad) - g_riesz(r - d, alpha, quad)) -
                       (g_riesz(r + 2.0 * d, alpha, quad) - g_riesz(r - 2.0 * d, alpha, quad))) /
                      (12.0 * d);
    return df_lambda(lambda, r) + Q * dg;
  };

  // Grow a bracket a < b < c with h(b) below both ends.
  double b = out.r_lambda;
  double a = b / 1.5;
  double c = b * 1.5;
  double ha = h(a), hb = h(b), hc = h(c);
  for (int it = 0; it < 200 && !(hb < ha && hb < hc); ++it) {
    if (ha <= hb) {
      c = b, hc = hb;
      b = a, hb = ha;
      a = b / 1.5, ha = h(a);
    } else {
      a = b, ha = hb;
      b = c, hb = hc;
      c = b * 1.5, hc = h(c);
    }
  }
  if (!(hb < ha && hb < hc)) throw NumericalFailure("charged annulus: could not bracket the minimum");
  out.bracket_lo = a;
  out.bracket_hi = c;

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a, hi = c;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double h1 = h(x1), h2 = h(x2);
  while (hi - lo > 1e-9 * b) {
    if (h1 < h2) {
      hi = x2;
      x2 = x1, h2 = h1;
      x1 = hi - invphi * (hi - lo);
      h1 = h(x1);
    } else {
      lo = x1;
      x1 = x2, h1 = h2;
      x2 = lo + invphi * (hi - lo);
      h2 = h(x2);
    }
  }
  double r = 0.5 * (lo + hi);
  // Newton polish on central differences of h'.
  for (int it = 0; it < 8; ++it) {
    const double g1 = dh(r);
    if (std::abs(g1) * r <= 1e-11 * h(r)) break;
    const double d = 5e-2 * r;
    const double g2 = (dh(r + d) - dh(r - d)) / (2.0 * d);
    if (!(g2 > 0.0)) break;
    // Noise in h can park golden section off the true minimum, so accept any
    // step that stays in the bracket and shrinks |h'|.
    const double next = r - g1 / g2;
    if (!(next > a && next < c) || !(std::abs(dh(next)) < std::abs(g1))) break;
    r = next;
  }
  out.r_star = r;
  out.energy = h(r);
  out.derivative = dh(r);
  out.shift = r - out.r_lambda;
  if (std::abs(out.derivative) * r > 1e-5 * out.energy)
    throw NumericalFailure("charged annulus: stationarity test |h'| r <= 1e-5 h failed");
  return out;
}

double shell_rate_envelope(double epsilon, double alpha) {
  if (alpha > 1.0) return epsilon * epsilon;
  if (alpha == 1.0) return epsilon * epsilon * std::abs(std::log(epsilon));
  return std::pow(epsilon, 1.0 + alpha);
}

ShellRate shell_riesz_rate(double epsilon, double alpha, int dim, const QuadratureControls& quad) {
  require(epsilon > 0.0 && epsilon <= 0.5, "epsilon must lie in (0, 1/2]");
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  require(alpha > 0.0 && alpha < dim, "alpha must lie in (0, dim)");
  const RieszResult v = riesz::annulus_covariogram(dim, alpha, 1.0, 1.0 - epsilon, Point{}, quad);
  return {v.value, v.error, shell_rate_envelope(epsilon, alpha)};
}

double shell_thickness_3d(double R, double n) {
  require(R > 0.0 && n > 0.0, "shell needs R > 0 and n > 0");
  // (R+h)^3 - R^3 = 1/n  =>  h = (1/n) / ((R+h)^2 + (R+h) R + R^2)
  const double a = std::cbrt(R * R * R + 1.0 / n);
  return (1.0 / n) / (a * a + a * R + R * R);
}

}  // namespace cdrops::annulus
