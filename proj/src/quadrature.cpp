#include "cdrops/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace cdrops::quad {

namespace {

template <unsigned N>
GaussRule expand_boost_rule() {
  using Boost = boost::math::quadrature::gauss<double, N>;
  const auto& x = Boost::abscissa();
  const auto& w = Boost::weights();
  GaussRule rule;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.nodes.push_back(0.0);
      rule.weights.push_back(w[i]);
    } else {
      rule.nodes.push_back(-x[i]);
      rule.weights.push_back(w[i]);
      rule.nodes.push_back(x[i]);
      rule.weights.push_back(w[i]);
    }
  }
  return rule;
}

GaussRule make_rule(int order) {
  switch (order) {
    case 4: return expand_boost_rule<4>();
    case 6: return expand_boost_rule<6>();
    case 8: return expand_boost_rule<8>();
    case 10: return expand_boost_rule<10>();
    case 12: return expand_boost_rule<12>();
    case 16: return expand_boost_rule<16>();
    case 20: return expand_boost_rule<20>();
    case 24: return expand_boost_rule<24>();
    case 30: return expand_boost_rule<30>();
    default: throw std::invalid_argument("unsupported Gauss-Legendre order " + std::to_string(order));
  }
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

std::vector<Interval> graded_panels(double a, double b, bool toward_a, bool toward_b, int levels, double sigma) {
  std::vector<Interval> panels;
  if (!(b > a)) return panels;
  if (!toward_a && !toward_b) {
    panels.emplace_back(a, b);
    return panels;
  }
  // Split point: the graded halves meet in the middle when both ends are graded.
  const double split = (toward_a && toward_b) ? 0.5 * (a + b) : (toward_a ? b : a);
  if (toward_a) {
    double hi = split;
    const double len = split - a;
    double w = len;
    std::vector<Interval> left;
    for (int j = 0; j < levels; ++j) {
      w *= sigma;
      left.emplace_back(a + w, hi);
      hi = a + w;
    }
    left.emplace_back(a, hi);
    std::reverse(left.begin(), left.end());
    panels.insert(panels.end(), left.begin(), left.end());
  }
  if (toward_b) {
    double lo = split;
    const double len = b - split;
    double w = len;
    for (int j = 0; j < levels; ++j) {
      w *= sigma;
      panels.emplace_back(lo, b - w);
      lo = b - w;
    }
    panels.emplace_back(lo, b);
  }
  return panels;
}

double integrate_abs_periodic(const std::function<double(double)>& F, int n) {
  const double h = 2.0 * M_PI / n;
  std::vector<double> values(n);
  for (int j = 0; j < n; ++j) values[j] = F(j * h);

  std::vector<double> roots;
  for (int j = 0; j < n; ++j) {
    const double f0 = values[j];
    const double f1 = values[(j + 1) % n];
    if ((f0 < 0.0) == (f1 < 0.0)) continue;
    double lo = j * h;
    double hi = (j + 1) * h;
    double flo = f0;
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = F(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }

  if (roots.empty()) {
    // No sign change: the periodic trapezoid rule is spectrally accurate.
    double s = 0.0;
    for (double v : values) s += v;
    return std::abs(s * h);
  }

  const GaussRule& rule = gauss_legendre(16);
  const double max_chunk = std::min(4.0 * h, 2.0 * M_PI / 32.0);
  double total = 0.0;
  const std::size_t m = roots.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = roots[i];
    const double hi = (i + 1 < m) ? roots[i + 1] : roots[0] + 2.0 * M_PI;
    const int chunks = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_chunk)));
    const double step = (hi - lo) / chunks;
    double seg = 0.0;
    for (int c = 0; c < chunks; ++c) {
      const double a = lo + c * step;
      const double half = 0.5 * step;
      const double mid = a + half;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) seg += rule.weights[q] * half * F(mid + half * rule.nodes[q]);
    }
    total += std::abs(seg);
  }
  return total;
}

}  // namespace cdrops::quad
