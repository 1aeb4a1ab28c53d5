#include "doctest.h"

#include <cmath>

#include "cdrops/geometry.hpp"
#include "cdrops/types.hpp"

using namespace cdrops;

namespace {

FourierCurve mode2(double t, double R = 1.0, Point c = {}) {
  FourierCurve f = FourierCurve::circle(R, c, 4);
  f.a[2] = t;
  return f;
}

// Midpoint rule with many points; independent of the library's trapezoid.
template <class F>
double dense(F&& f, int n = 1'000'000) {
  double s = 0.0;
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) s += f((i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_CASE("curve invariants") {
  FourierCurve c = FourierCurve::circle(1.0);
  CHECK_NOTHROW(c.validate());
  c.a[2] = -1.5;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  FourierCurve k1 = FourierCurve::circle(1.0);
  k1.a.resize(2), k1.b.resize(2);
  CHECK_THROWS_AS(k1.validate(), InvalidInput);
  FourierCurve few = FourierCurve::circle(1.0, {}, 8, 32);
  CHECK_THROWS_AS(few.validate(), InvalidInput);
  FourierCurve neg = FourierCurve::circle(1.0);
  neg.base_radius = -1.0;
  CHECK_THROWS_AS(neg.validate(), InvalidInput);
}

TEST_CASE("area") {
  CHECK(area(FourierCurve::circle(1.0)) == doctest::Approx(kPi).epsilon(1e-15));
  for (double t : {0.1, 0.5, 0.9}) {
    FourierCurve c = FourierCurve::circle(1.0);
    c.a[1] = t;
    CHECK(area(c) == doctest::Approx(kPi * (1.0 + t * t / 2.0)).epsilon(1e-14));
  }
  FourierCurve c = FourierCurve::circle(1.0, {}, 3);
  c.a[2] = 0.1;
  c.b[3] = 0.05;
  const double ref = dense([](double th) {
    const double u = 1.0 + 0.1 * std::cos(2 * th) + 0.05 * std::sin(3 * th);
    return 0.5 * u * u;
  });
  CHECK(std::abs(area(c) - ref) < 1e-10);
}

TEST_CASE("perimeter and closed-form annulus") {
  CHECK(perimeter(FourierCurve::circle(1.0)) == doctest::Approx(kTwoPi).epsilon(1e-15));
  CHECK(std::abs(perimeter(mode2(0.1)) - 6.3457068653416690574) < 1e-10);
  const double ref = dense([](double th) {
    const double u = 1.0 + 0.1 * std::cos(2 * th);
    const double d = -0.2 * std::sin(2 * th);
    return std::sqrt(u * u + d * d);
  });
  CHECK(std::abs(perimeter(mode2(0.1)) - ref) < 1e-10);
  const double r = 0.7;
  CHECK(perimeter(AnnulusSpec{2, r, std::sqrt(1 + r * r), {}}) ==
        doctest::Approx(kTwoPi * (r + std::sqrt(1 + r * r))).epsilon(1e-15));
  CHECK(perimeter(AnnulusSpec{3, 1.0, 2.0, {}}) == doctest::Approx(4 * kPi * 5.0).epsilon(1e-15));
}

TEST_CASE("scaling and translation") {
  FourierCurve c = mode2(0.1);
  c.b[3] = 0.02;
  for (double s : {0.5, 3.0}) {
    FourierCurve d = c;
    d.base_radius *= s;
    CHECK(area(d) == doctest::Approx(s * s * area(c)).epsilon(1e-14));
    CHECK(perimeter(d) == doctest::Approx(s * perimeter(c)).epsilon(1e-14));
  }
  FourierCurve t = c;
  t.center = {2.5, -1.0, 0.0};
  CHECK(std::abs(area(t) - area(c)) < 1e-12);
  CHECK(std::abs(perimeter(t) - perimeter(c)) < 1e-12);
  CHECK(std::abs(asymmetry(t).value - asymmetry(c).value) < 1e-9);
  FourierCurve u = FourierCurve::circle(1.0, t.center, 4);
  CHECK(std::abs(symmetric_difference(t, u) - symmetric_difference(c, FourierCurve::circle(1.0, {}, 4))) < 1e-12);
}

TEST_CASE("barycenter") {
  Point b = barycenter(FourierCurve::circle(1.0));
  CHECK(std::abs(b.x) < 1e-15);
  CHECK(std::abs(b.y) < 1e-15);
  b = barycenter(FourierCurve::circle(1.0, {2.0, -1.0, 0.0}));
  CHECK(b.x == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b.y == doctest::Approx(-1.0).epsilon(1e-14));
  FourierCurve c = FourierCurve::circle(1.0);
  c.a[1] = 0.2;
  // int (1 + 0.2 cos)^3 cos / (3 |E|) = 0.606 pi / (3 * 1.02 pi)
  CHECK(std::abs(barycenter(c).x - 0.606 / 3.06) < 1e-12);
}

TEST_CASE("symmetric difference") {
  const FourierCurve c = mode2(0.1);
  CHECK(symmetric_difference(c, c) == 0.0);
  CHECK(symmetric_difference(FourierCurve::circle(1.0), FourierCurve::circle(1.5)) ==
        doctest::Approx(kPi * 1.25).epsilon(1e-14));
  FourierCurve off = FourierCurve::circle(1.0, {0.1, 0.0, 0.0});
  CHECK_THROWS_AS(symmetric_difference(c, off), InvalidInput);
  const double exact = symmetric_difference(c, Ball{2, {}, 1.0});
  CHECK(std::abs(symmetric_difference(c, FourierCurve::circle(1.0, {}, 4)) - exact) < 1e-12);
  const double raster = symmetric_difference_raster(c, Ball{2, {}, 1.0}, 4096);
  CHECK(std::abs(raster - exact) / exact < 1e-3);
  // Offset disk: the exact route and the raster agree.
  const Ball shifted{2, {0.05, 0.02, 0.0}, 1.0};
  const double e2 = symmetric_difference(c, shifted);
  CHECK(std::abs(symmetric_difference_raster(c, shifted, 4096) - e2) / e2 < 1e-3);
}

TEST_CASE("asymmetry") {
  CHECK(asymmetry(FourierCurve::circle(1.0)).value < 1e-9);
  const auto moved = asymmetry(FourierCurve::circle(1.0, {3.0, 0.0, 0.0}));
  CHECK(moved.value < 1e-9);
  CHECK(std::abs(moved.best_center.x - 3.0) < 1e-5);

  FourierCurve c = mode2(0.1);
  c.a[0] = std::sqrt(1.0 - 0.01 / 2.0) - 1.0;  // area pi
  const auto a = asymmetry(c);
  CHECK(std::abs(a.ball_radius - 1.0) < 1e-12);
  const double centered = symmetric_difference(c, Ball{2, {}, 1.0});
  CHECK(std::abs(a.value - centered) / centered < 1e-3);
  CHECK(norm(a.best_center - barycenter(c)) < 1e-3);
  CHECK(a.value <= centered + 1e-12);
}

TEST_CASE("asymmetry never exceeds the centered comparison") {
  for (int s = 0; s < 6; ++s) {
    FourierCurve c = FourierCurve::circle(1.0, {}, 5);
    c.a[1] = 0.03 * std::sin(s + 1.0);
    c.a[2] = 0.05 * std::cos(3.0 * s);
    c.b[3] = 0.04 * std::sin(2.0 * s + 0.5);
    c.a[5] = 0.01 * s;
    const double R = std::sqrt(area(c) / kPi);
    CHECK(asymmetry(c).value <= symmetric_difference(c, Ball{2, {}, R}) + 1e-12);
  }
}

TEST_CASE("annulus and configuration invariants") {
  CHECK_THROWS_AS((AnnulusSpec{2, 1.0, 1.2, {0.3, 0.0, 0.0}}.validate()), InvalidInput);
  CHECK_NOTHROW((AnnulusSpec{2, 0.5, 1.2, {0.3, 0.0, 0.0}}.validate()));
  CHECK(volume(AnnulusSpec{2, 1.0, std::sqrt(2.0), {}}) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(volume(AnnulusSpec{3, 1.0, 2.0, {}}) == doctest::Approx(4.0 / 3.0 * kPi * 7.0).epsilon(1e-15));

  Configuration two;
  two.components.push_back({Ball{2, {0, 0, 0}, 1.0}, {}});
  two.components.push_back({Ball{2, {3, 0, 0}, 1.0}, {}});
  CHECK_NOTHROW(two.validate());
  two.components[1].outer = Ball{2, {1.5, 0, 0}, 1.0};
  CHECK_THROWS_AS(two.validate(), InvalidInput);
  Configuration holed = Configuration::from_annulus(AnnulusSpec{2, 0.5, 1.0, {}});
  CHECK_NOTHROW(holed.validate());
  CHECK(volume(holed) == doctest::Approx(kPi * 0.75).epsilon(1e-14));
}

TEST_CASE("mass rescaling") {
  EnergyParams p;
  p.lambda = 1.0;
  p.Q = 1.0;
  p.alpha = 1.0;
  auto id = rescale_mass(p, MassBudget{kPi, 2});
  CHECK(id.params.lambda == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(id.params.Q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(id.prefactor == doctest::Approx(1.0).epsilon(1e-15));
  auto four = rescale_mass(p, MassBudget{4 * kPi, 2});
  CHECK(four.params.lambda == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(four.params.Q == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(four.prefactor == doctest::Approx(0.5).epsilon(1e-14));
  p.lambda = 0.37;
  p.Q = 2.5;
  p.alpha = 1.3;
  const MassBudget m{2.7, 2};
  const EnergyParams back = unscale_mass(rescale_mass(p, m).params, m);
  CHECK(std::abs(back.lambda - p.lambda) < 1e-12);
  CHECK(std::abs(back.Q - p.Q) < 1e-12);
  CHECK_THROWS_AS(rescale_mass(p, MassBudget{-1.0, 2}), InvalidInput);
}
