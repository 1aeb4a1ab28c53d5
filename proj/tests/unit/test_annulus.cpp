#include "doctest.h"

#include <cmath>
#include <vector>

#include "cdrops/annulus.hpp"
#include "cdrops/riesz.hpp"
#include "cdrops/types.hpp"

using namespace cdrops;
using namespace cdrops::annulus;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

}  // namespace

TEST_CASE("f_lambda values") {
  CHECK(std::abs(f_lambda(1.0, 1.0) - 25.89501942883427169) < 1e-12);
  CHECK_THROWS_AS(f_lambda(1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(f_lambda(1.0, -2.0), InvalidInput);
  // Bending-only annuli degenerate: f_0 decreases to zero.
  double prev = f_lambda(0.0, 10.0);
  for (double r : {20.0, 100.0, 1e3, 1e5}) {
    const double f = f_lambda(0.0, r);
    CHECK(f < prev);
    CHECK(f > 0.0);
    prev = f;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("f_lambda is convex with negative third derivative") {
  for (double lambda : {0.1, 1.0, 10.0}) {
    CAPTURE(lambda);
    for (double r : log_grid(1e-2, 1e2, 41)) {
      CAPTURE(r);
      const double h = 1e-2 * r;
      const double f0 = f_lambda(lambda, r - h), f1 = f_lambda(lambda, r), f2 = f_lambda(lambda, r + h),
                   f3 = f_lambda(lambda, r + 2 * h);
      CHECK(f0 - 2 * f1 + f2 > 0.0);
      CHECK(f3 - 3 * f2 + 3 * f1 - f0 < 0.0);
      CHECK(d2f_lambda(lambda, r) > 0.0);
      CHECK(f_lambda(lambda, r) < 0.5 * (f_lambda(lambda, 0.5 * r) + f_lambda(lambda, 1.5 * r)));
    }
  }
}

TEST_CASE("r_lambda by bisection and by the quartic") {
  CHECK(std::abs(r_lambda(1.0) - 0.8808624156611469924) < 1e-12);
  CHECK(std::abs(r_lambda(1.0) - 0.88) < 0.01);
  const double want[] = {4.418000406416626953, 1.291941941912037814, 0.3919795898438455351};
  const double lams[] = {0.05, 0.5, 5.0};
  for (int i = 0; i < 3; ++i) {
    CAPTURE(lams[i]);
    const double r = r_lambda(lams[i]);
    CHECK(std::abs(r - r_lambda_quartic(lams[i])) <= 1e-10);
    CHECK(std::abs(r - want[i]) <= 1e-12 * want[i]);
    CHECK(std::abs(df_lambda(lams[i], r)) <= 1e-10);
    CHECK(d2f_lambda(lams[i], r) > 0.0);
  }
  const double small = 1e-4;
  CHECK(r_lambda(small) * std::sqrt(small) >= 0.9);
  CHECK(r_lambda(small) * std::sqrt(small) <= 1.1);
  CHECK_THROWS_AS(r_lambda(0.0), InvalidInput);
}

TEST_CASE("minimum of f is above the square-root bound") {
  for (double lambda : log_grid(1e-3, 1e2, 16)) {
    CAPTURE(lambda);
    CHECK(f_lambda(lambda, r_lambda(lambda)) >= kTwoPi * (2 * std::sqrt(lambda) + lambda));
  }
}

TEST_CASE("riesz energy of unit-area annuli") {
  clear_g_cache();
  double prev = 1e300;
  const double ball = riesz::ball(2, 1.0, 1.0, {}).value;
  for (double r : {0.5, 1.0, 2.0, 4.0}) {
    const double g = g_riesz(r, 1.0);
    CHECK(g < prev);
    CHECK(g <= ball);
    prev = g;
  }
  CHECK(std::abs(g_riesz(1.0, 1.0) - 12.066865684565991411) < 1e-8 * 12.07);
  // Thin rings decay like sqrt(width): per unit length a strip of width d
  // carries d^(3/2) (8/3) B with B = int (1+x^2)^(-3/4) dx, and length times
  // width is pi.
  const double B = std::sqrt(kPi) * std::tgamma(0.25) / std::tgamma(0.75);
  for (double r : {10.0, 100.0}) {
    const double width = std::sqrt(1 + r * r) - r;
    CHECK(std::abs(g_riesz(r, 0.5) / std::sqrt(width) / (kPi * 8.0 / 3.0 * B) - 1.0) < 0.02 + 0.1 / r);
  }
  CHECK(g_riesz(100.0, 0.5) < g_riesz(1.0, 0.5) / 8.0);
  // Memoization does not change values.
  const double cached = g_riesz(2.0, 1.0);
  clear_g_cache();
  CHECK(g_riesz(2.0, 1.0) == cached);
}

TEST_CASE("uncharged optimum is r_lambda") {
  const OptimalAnnulus a = optimal_charged_annulus(0.5, 0.0, 1.0);
  CHECK(a.r_star == r_lambda(0.5));
  CHECK(a.shift == 0.0);
}

TEST_CASE("charged optimum") {
  struct Frozen {
    double lambda, Q, r;
  };
  for (const Frozen& f : {Frozen{1.0, 1.0, 1.157618180887}, Frozen{1.0, 0.1, 0.904747118741}}) {
    const OptimalAnnulus a = optimal_charged_annulus(f.lambda, f.Q, 1.0);
    CHECK(std::abs(a.r_star - f.r) < 1e-9);
  }
  for (double lambda : {0.2, 1.0, 5.0}) {
    for (double Q : {1e-3, 1e-1, 1.0}) {
      CAPTURE(lambda);
      CAPTURE(Q);
      const OptimalAnnulus a = optimal_charged_annulus(lambda, Q, 1.0);
      CHECK(std::abs(a.derivative) <= 1e-8 * a.energy);
      CHECK(a.shift > 0.0);
      CHECK(a.r_star >= a.r_lambda);
      const double h = [&](double r) { return f_lambda(lambda, r) + Q * g_riesz(r, 1.0); }(a.r_star);
      CHECK(h == doctest::Approx(a.energy).epsilon(1e-14));
      CHECK(a.energy < f_lambda(lambda, a.bracket_lo) + Q * g_riesz(a.bracket_lo, 1.0));
      CHECK(a.energy < f_lambda(lambda, a.bracket_hi) + Q * g_riesz(a.bracket_hi, 1.0));
    }
  }
}

TEST_CASE("shift is linear in small charge") {
  const double s3 = optimal_charged_annulus(1.0, 1e-3, 1.0).shift / 1e-3;
  const double s2 = optimal_charged_annulus(1.0, 1e-2, 1.0).shift / 1e-2;
  CHECK(std::max(s2, s3) / std::min(s2, s3) < 4.0);
}

TEST_CASE("monotone in charge and weight") {
  const double lams[] = {0.2, 1.0, 5.0};
  const double qs[] = {1e-2, 1e-1, 1.0};
  for (double lambda : lams) {
    double prev = 0.0;
    for (double Q : qs) {
      const double s = optimal_charged_annulus(lambda, Q, 1.0).shift;
      CHECK(s > prev);
      prev = s;
    }
  }
  for (double Q : qs) {
    double prev = 1e300;
    for (double lambda : lams) {
      const double r = optimal_charged_annulus(lambda, Q, 1.0).r_star;
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("shell envelopes") {
  const double e = 0.125;
  CHECK(shell_rate_envelope(e, 1.5) == doctest::Approx(e * e));
  CHECK(shell_rate_envelope(e, 1.0) == doctest::Approx(e * e * std::abs(std::log(e))));
  CHECK(shell_rate_envelope(e, 0.5) == doctest::Approx(std::pow(e, 1.5)));
  CHECK_THROWS_AS(shell_riesz_rate(0.75, 1.0, 2), InvalidInput);
}
