#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace cdrops::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Supported orders: 4, 6, 8, 10, 12, 16, 20, 24, 30. Rules are cached.
const GaussRule& gauss_legendre(int order);

using Interval = std::pair<double, double>;

/// Panels of [a, b] refined geometrically (ratio `sigma`) toward the ends
/// flagged by `toward_a` / `toward_b`; `levels` panels per graded end.
std::vector<Interval> graded_panels(double a, double b, bool toward_a, bool toward_b, int levels,
                                    double sigma = 0.2);

template <class F>
double integrate_panels(F&& f, const std::vector<Interval>& panels, const GaussRule& rule) {
  double total = 0.0;
  for (const auto& [lo, hi] : panels) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * s;
  }
  return total;
}

/// Integral over [a, b] on graded panels.
template <class F>
double integrate_graded(F&& f, double a, double b, bool toward_a, bool toward_b, int levels, int order) {
  if (!(b > a)) return 0.0;
  return integrate_panels(f, graded_panels(a, b, toward_a, toward_b, levels), gauss_legendre(order));
}

/// Integral of rho^(alpha-1) f(rho) over [0, L] for f smooth near 0. Panels are
/// graded toward 0 down to a width where the remainder is added in closed form
/// with f frozen at its left-panel value; also graded toward L when `toward_end`.
template <class F>
double integrate_power_weighted(F&& f, double L, double alpha, int levels, int order, bool toward_end = true) {
  if (!(L > 0.0)) return 0.0;
  const double sigma = 0.2;
  // Freezing f on the innermost piece [0, w] costs about |f'| w^(alpha+1);
  // grade until that is below double precision relative to L^(alpha+1).
  const double mid = 0.5 * L;
  int zero_levels = 0;
  double width = mid;
  while (zero_levels < levels || std::pow(width / L, alpha + 1.0) > 1e-17) {
    width *= sigma;
    ++zero_levels;
  }
  const GaussRule& rule = gauss_legendre(order);
  auto weighted = [&](double r) { return std::pow(r, alpha - 1.0) * f(r); };
  double total = 0.0;
  // [0, mid] graded toward 0.
  std::vector<Interval> left;
  double hi = mid;
  for (int j = 0; j < zero_levels; ++j) {
    const double lo = hi * sigma;
    left.emplace_back(lo, hi);
    hi = lo;
  }
  total += integrate_panels(weighted, left, rule);
  total += f(0.5 * hi) * std::pow(hi, alpha) / alpha;
  total += integrate_panels(weighted, graded_panels(mid, L, false, toward_end, levels, sigma), rule);
  return total;
}

/// Integral of |F| over one period [0, 2 pi) for a smooth periodic F. Sign
/// changes are located on an n-point grid, refined by bisection, and F is
/// integrated with Gauss-Legendre between consecutive roots.
double integrate_abs_periodic(const std::function<double(double)>& F, int n);

}  // namespace cdrops::quad
