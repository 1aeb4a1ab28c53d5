#include "doctest.h"

#include <cmath>

#include "cdrops/cells.hpp"
#include "cdrops/riesz.hpp"
#include "cdrops/types.hpp"

using namespace cdrops;

namespace {

const QuadratureControls kQuad{};

bool close_rel(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

struct Frozen {
  int dim;
  double alpha, r_in, r_out, value;
};

// Independent high-precision oracle values (see tests/oracles).
const Frozen kFrozen[] = {
    {2, 0.5, 0.0, 1.0, 34.068459561138064206},
    {2, 0.5, 1.0, 1.4142135623730950488, 26.21664632902215685},
    {2, 1.0, 0.0, 1.0, 16.755160819145563938},
    {2, 1.0, 1.0, 1.4142135623730950488, 12.066865684565991411},
    {2, 1.5, 0.0, 1.0, 11.834407386243772128},
    {2, 1.5, 1.0, 1.4142135623730950488, 9.514155286601181809},
    {3, 1.0, 0.0, 1.0, 39.478417604357434475},
    {3, 1.0, 1.0, 1.2599210498948731648, 24.991073870758848797},
    {3, 1.5, 0.0, 1.0, 26.467988668260046826},
    {3, 1.5, 1.0, 1.2599210498948731648, 16.818579923935593683},
    {3, 2.0, 0.0, 1.0, 21.055156055657298387},
    {3, 2.0, 1.0, 1.2599210498948731648, 14.871245647433447086},
    {3, 2.5, 0.0, 1.0, 18.561966079039513358},
    {3, 2.5, 1.0, 1.2599210498948731648, 15.403590460718886892},
};

}  // namespace

TEST_CASE("covariogram route against frozen values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.dim);
    CAPTURE(f.alpha);
    CAPTURE(f.r_in);
    const RieszResult r = riesz::annulus_covariogram(f.dim, f.alpha, f.r_out, f.r_in, {}, kQuad);
    CHECK(close_rel(r.value, f.value, 1e-9));
    CHECK(r.error <= 1e-6 * r.value);
  }
}

TEST_CASE("angular kernel route agrees with the covariogram") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.dim);
    CAPTURE(f.alpha);
    const RieszResult k = riesz::annulus_kernel(f.dim, f.alpha, f.r_out, f.r_in, kQuad);
    CHECK(close_rel(k.value, f.value, 1e-7));
  }
}

TEST_CASE("lens volume limits") {
  CHECK(riesz::lens_volume(2, 1.0, 0.5, 2.0) == 0.0);
  CHECK(riesz::lens_volume(2, 1.0, 0.5, 0.2) == doctest::Approx(kPi * 0.25).epsilon(1e-14));
  CHECK(riesz::lens_volume(3, 1.0, 0.5, 0.2) == doctest::Approx(4.0 / 3.0 * kPi * 0.125).epsilon(1e-14));
  // Two unit disks at distance 1: 2 pi / 3 - sqrt(3) / 2.
  CHECK(riesz::lens_volume(2, 1.0, 1.0, 1.0) == doctest::Approx(2 * kPi / 3 - std::sqrt(3.0) / 2).epsilon(1e-14));
  // Two unit balls at distance 1: 5 pi / 12.
  CHECK(riesz::lens_volume(3, 1.0, 1.0, 1.0) == doctest::Approx(5 * kPi / 12).epsilon(1e-14));
  for (double c : {0.3, 0.9, 1.4}) {
    CHECK(riesz::lens_volume(2, 1.0, 0.6, c) == doctest::Approx(riesz::lens_volume(2, 0.6, 1.0, c)).epsilon(1e-13));
    CHECK(riesz::lens_volume(3, 1.0, 0.6, c) == doctest::Approx(riesz::lens_volume(3, 0.6, 1.0, c)).epsilon(1e-13));
  }
}

TEST_CASE("scaling law") {
  for (int dim : {2, 3}) {
    const double alpha = dim == 2 ? 1.5 : 2.5;
    const double v1 = riesz::ball(dim, alpha, 1.0, kQuad).value;
    for (double s : {0.5, 2.0, 3.7}) {
      const double vs = riesz::ball(dim, alpha, s, kQuad).value;
      CHECK(close_rel(vs, std::pow(s, dim + alpha) * v1, 1e-10));
    }
  }
}

TEST_CASE("offset annulus exceeds the centered one") {
  const double centered = riesz::annulus_covariogram(2, 1.0, 1.2, 0.5, {}, kQuad).value;
  const RieszResult off = riesz::annulus_covariogram(2, 1.0, 1.2, 0.5, {0.3, 0.0, 0.0}, kQuad);
  CHECK(off.value > centered + off.error);
  // Rotating the offset changes nothing.
  const double rotated = riesz::annulus_covariogram(2, 1.0, 1.2, 0.5, {0.0, 0.3, 0.0}, kQuad).value;
  CHECK(close_rel(rotated, off.value, 1e-12));
}

TEST_CASE("self cell constant") {
  const double want[] = {8.055609281918389809, 2.9732095982473787025, 1.5844091715698880935};
  const double alphas[] = {0.5, 1.0, 1.5};
  for (int i = 0; i < 3; ++i) {
    CHECK(close_rel(cells::self_interaction_polar(alphas[i]), want[i], 1e-12));
    CHECK(close_rel(cells::box_interaction(alphas[i], 0, 0), want[i], 1e-9));
  }
}

TEST_CASE("cell quadrature tracks the radial route") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    CAPTURE(alpha);
    const double exact = riesz::ball(2, alpha, 1.0, kQuad).value;
    const RieszResult r = cells::riesz(FourierCurve::circle(1.0), alpha, kQuad);
    CHECK(std::abs(r.value - exact) <= std::max(3.0 * r.error, 2e-3 * exact));
  }
}

TEST_CASE("monte carlo is unbiased within its error bar") {
  const double exact = riesz::ball(2, 1.0, 1.0, kQuad).value;
  const RieszResult mc = riesz::monte_carlo([](const Point& p) { return p.x * p.x + p.y * p.y < 1.0; }, 2, kPi, {}, 1.0,
                                            1.0, 200000, 7);
  CHECK(mc.error > 0.0);
  CHECK(std::abs(mc.value - exact) < 4.0 * mc.error);
  const RieszResult again = riesz::monte_carlo([](const Point& p) { return p.x * p.x + p.y * p.y < 1.0; }, 2, kPi, {},
                                               1.0, 1.0, 200000, 7);
  CHECK(again.value == mc.value);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(riesz::annulus_covariogram(2, 2.5, 1.0, 0.0, {}, kQuad), InvalidInput);
  CHECK_THROWS_AS(riesz::annulus_covariogram(4, 1.0, 1.0, 0.0, {}, kQuad), InvalidInput);
  CHECK_THROWS_AS(riesz::annulus_covariogram(2, 1.0, 1.0, 0.9, {0.2, 0.0, 0.0}, kQuad), InvalidInput);
}
