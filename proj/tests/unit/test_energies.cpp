#include "doctest.h"

#include <cmath>

#include "cdrops/annulus.hpp"
#include "cdrops/energies.hpp"
#include "cdrops/geometry.hpp"
#include "cdrops/riesz.hpp"

using namespace cdrops;

namespace {

EnergyParams params(int dim, double lambda, double Q, double alpha) {
  EnergyParams p;
  p.dim = dim;
  p.lambda = lambda;
  p.Q = Q;
  p.alpha = alpha;
  return p;
}

}  // namespace

TEST_CASE("elastica of circles") {
  for (double R : {0.1, 1.0, 10.0}) {
    CAPTURE(R);
    CHECK(std::abs(elastica_energy(FourierCurve::circle(R)) - kTwoPi / R) <= 1e-10 / R);
  }
  FourierCurve bad = FourierCurve::circle(1.0, {}, 4);
  bad.a[3] = -1.2;
  CHECK_THROWS_AS(elastica_energy(bad), InvalidInput);
}

TEST_CASE("elastica second variation of a mode-2 bump") {
  // At area pi: 2 pi + 7.5 pi t^2 + o(t^2), so the scaled residual must shrink with t.
  double prev = 1e300;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    FourierCurve c = FourierCurve::circle(1.0, {}, 4);
    c.a[2] = t;
    c.a[0] = std::sqrt(1.0 - t * t / 2.0) - 1.0;
    const double resid = std::abs(elastica_energy(c) - kTwoPi - 7.5 * kPi * t * t) / (t * t);
    CAPTURE(t);
    CHECK(resid < prev);
    prev = resid;
  }
  CHECK(prev < 1e-3);
  FourierCurve c = FourierCurve::circle(1.0, {}, 4);
  c.a[2] = 0.1;
  CHECK(std::abs(elastica_energy(c) - 6.5077628057389056368) < 1e-10);
}

TEST_CASE("closed Willmore energies") {
  CHECK(willmore_closed(Ball{3, {}, 1.0}) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(willmore_closed(Ball{3, {1, 2, 3}, 17.0}) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(willmore_closed(AnnulusSpec{3, 5.0, 5.01, {}}) == doctest::Approx(8 * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(willmore_closed(Ball{2, {}, 1.0}), InvalidInput);
  CHECK_THROWS_AS(willmore_closed(FourierCurve::circle(1.0)), InvalidInput);
  // Planar annulus bending is the sum over both circles.
  CHECK(bending_energy(AnnulusSpec{2, 0.5, 2.0, {}}) == doctest::Approx(kTwoPi * (2.0 + 0.5)).epsilon(1e-14));
}

TEST_CASE("total energy examples") {
  const EnergyReport b = total_energy(Ball{2, {}, 1.0}, params(2, 1.0, 0.0, 1.0));
  CHECK(b.total == doctest::Approx(4 * kPi).epsilon(1e-14));

  const EnergyReport a = total_energy(AnnulusSpec{2, 1.0, std::sqrt(2.0), {}}, params(2, 1.0, 0.0, 1.0));
  CHECK(std::abs(a.total - 25.89501942883427169) < 1e-12);
  CHECK(std::abs(a.total - annulus::f_lambda(1.0, 1.0)) < 1e-12);

  for (double Q : {0.0, 0.3, 7.0}) {
    const EnergyReport r = total_energy(Ball{3, {}, 1.0}, params(3, 0.0, Q, 1.5));
    const double v = riesz_energy(Ball{3, {}, 1.0}, params(3, 0.0, Q, 1.5)).value;
    CHECK(r.total == doctest::Approx(4 * kPi + Q * v).epsilon(1e-14));
    CHECK(std::abs(v - 26.467988668260046826) < 1e-8 * v);
  }
}

TEST_CASE("report reconstructs its total") {
  FourierCurve c = FourierCurve::circle(1.0, {}, 4);
  c.a[2] = 0.08;
  c.b[3] = -0.03;
  const Shape shapes[] = {Ball{2, {}, 1.3}, AnnulusSpec{2, 0.6, 1.4, {}}, AnnulusSpec{3, 0.7, 1.1, {}}, c};
  for (const Shape& s : shapes) {
    const int dim = shape_dim(s);
    const EnergyReport r = total_energy(s, params(dim, 0.7, 2.5, 1.0));
    const double rebuilt = r.lambda * r.perimeter_raw + r.bending_term + r.Q * r.riesz_raw;
    CHECK(std::abs(r.total - rebuilt) <= 1e-12 * r.total);
    CHECK(r.riesz_error_estimate >= 0.0);
    CHECK(!r.method.empty());
  }
  CHECK_THROWS_AS(total_energy(Ball{3, {}, 1.0}, params(2, 1.0, 0.0, 1.0)), InvalidInput);
}

TEST_CASE("riesz translation invariance on the cell path") {
  FourierCurve c = FourierCurve::circle(1.0, {}, 4);
  c.a[2] = 0.1;
  c.b[3] = 0.05;
  FourierCurve t = c;
  t.center = {0.37, -1.91, 0.0};
  const EnergyParams p = params(2, 0.0, 1.0, 1.0);
  const double v0 = riesz_energy(c, p, RieszMethod::Cell).value;
  const double v1 = riesz_energy(t, p, RieszMethod::Cell).value;
  CHECK(std::abs(v1 - v0) <= 1e-8 * v0);
}

TEST_CASE("radial and Monte Carlo agree") {
  const EnergyParams p2 = params(2, 0.0, 1.0, 1.0);
  const EnergyParams p3 = params(3, 0.0, 1.0, 2.0);
  const Shape shapes[] = {Ball{2, {}, 1.0}, AnnulusSpec{2, 1.0, std::sqrt(2.0), {}}, Ball{3, {}, 1.0},
                          AnnulusSpec{3, 1.0, 1.3, {}}};
  for (const Shape& s : shapes) {
    const EnergyParams& p = shape_dim(s) == 2 ? p2 : p3;
    const RieszResult r = riesz_energy(s, p, RieszMethod::Radial);
    const RieszResult m = riesz_energy(s, p, RieszMethod::MonteCarlo);
    CHECK(std::abs(r.value - m.value) <= 3.0 * (r.error + m.error));
  }
}

TEST_CASE("riesz grows as the hole moves off center") {
  double prev = 0.0;
  for (double d : {0.0, 0.1, 0.2, 0.3}) {
    const double v = riesz_energy(AnnulusSpec{2, 0.5, 1.2, {d, 0.0, 0.0}}, params(2, 0.0, 1.0, 1.0)).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("thin shell rates stay bounded") {
  struct Case {
    int dim;
    double alpha;
  };
  for (const Case& c : {Case{2, 1.5}, Case{2, 1.0}, Case{2, 0.5}, Case{3, 2.0}, Case{3, 1.0}, Case{3, 0.5}}) {
    CAPTURE(c.dim);
    CAPTURE(c.alpha);
    double lo = 1e300, hi = 0.0;
    for (int k = 3; k <= 8; ++k) {
      const annulus::ShellRate s = annulus::shell_riesz_rate(std::ldexp(1.0, -k), c.alpha, c.dim);
      CHECK(s.rate == doctest::Approx(annulus::shell_rate_envelope(std::ldexp(1.0, -k), c.alpha)));
      const double ratio = s.value / s.rate;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    // Bounded above; a blow-up would show as a ratio growing with 1/eps.
    CHECK(hi / lo < 4.0);
  }
}

TEST_CASE("large 3D shells of unit volume") {
  double lo = 1e300, hi = 0.0;
  for (double R : {4.0, 8.0, 16.0, 32.0}) {
    const double h = annulus::shell_thickness_3d(R);
    CHECK(std::pow(R + h, 3) - std::pow(R, 3) == doctest::Approx(1.0).epsilon(1e-10));
    const double v = riesz_energy(AnnulusSpec{3, R, R + h, {}}, params(3, 0.0, 1.0, 0.5)).value;
    const double ratio = v * std::pow(R, 2 * 0.5);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 4.0);
}
