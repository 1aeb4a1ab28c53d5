#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "cdrops/energies.hpp"
#include "cdrops/geometry.hpp"
#include "cdrops/stability.hpp"

using namespace cdrops;
using namespace cdrops::stability;

namespace {

double coef(int k) { return std::pow(k, 4) - 2.5 * k * k + 1.5; }

FourierCurve random_small(std::uint64_t seed, double scale) {
  FourierCurve c = FourierCurve::circle(1.0, {}, 8);
  std::uint64_t s = seed * 0x9E3779B97F4A7C15ULL + 1;
  auto next = [&] {
    s ^= s >> 12, s ^= s << 25, s ^= s >> 27;
    return static_cast<double>((s * 0x2545F4914F6CDD1DULL) >> 11) * 0x1.0p-53 - 0.5;
  };
  for (int k = 0; k <= 8; ++k) {
    c.a[k] = scale * next() / (1 + k * k);
    if (k > 0) c.b[k] = scale * next() / (1 + k * k);
  }
  return c;
}

}  // namespace

TEST_CASE("quadratic form spectrum") {
  const auto spec = quadratic_form_spectrum(64);
  REQUIRE(spec.size() == 65);
  CHECK(spec[0].second == 1.5);
  CHECK(spec[1].second == 0.0);
  CHECK(spec[2].second == 7.5);
  for (const auto& [k, c] : spec) {
    CHECK(c == coef(k));
    if (k != 1) CHECK(c > 0.0);
  }
}

TEST_CASE("constraint projection") {
  const Perturbation zero = project_constraints(FourierCurve::circle(1.0));
  CHECK(zero.curve.a == FourierCurve::circle(1.0).a);
  CHECK(zero.curve.b == FourierCurve::circle(1.0).b);

  const double t = 0.05;
  FourierCurve c = FourierCurve::circle(1.0, {}, 4);
  c.a[2] = t;
  // Its W22 norm (about 0.41) is above the default small-norm cap.
  CHECK_THROWS_AS(project_constraints(c), InvalidInput);
  const Perturbation p = project_constraints(c, 1.0);
  CHECK(std::abs(p.curve.a[0] - (std::sqrt(1 - t * t / 2) - 1)) < 1e-12);
  CHECK(std::abs(p.curve.a[0] + t * t / 4) < t * t * t * t);
  CHECK(std::abs(p.curve.a[1]) < 1e-15);
  CHECK(std::abs(p.curve.b[1]) < 1e-15);
  CHECK(p.curve.a[2] == t);

  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Perturbation q = project_constraints(random_small(seed, 0.02));
    CHECK(std::abs(q.volume_residual) <= 1e-12);
    CHECK(q.barycenter_residual <= 1e-12);
    CHECK(std::abs(area(q.curve) - kPi) < 1e-11);
    const Perturbation twice = project_constraints(q.curve);
    for (std::size_t k = 0; k < q.curve.a.size(); ++k) {
      CHECK(std::abs(twice.curve.a[k] - q.curve.a[k]) <= 1e-12);
      CHECK(std::abs(twice.curve.b[k] - q.curve.b[k]) <= 1e-12);
    }
    for (std::size_t k = 2; k < q.curve.a.size(); ++k) CHECK(q.curve.a[k] == random_small(seed, 0.02).a[k]);
  }
}

TEST_CASE("taylor forms") {
  CHECK(taylor_elastica_deficit(FourierCurve::circle(1.0)) == 0.0);
  CHECK(taylor_perimeter_deficit(FourierCurve::circle(1.0)) == 0.0);
  for (int k = 1; k <= 6; ++k) {
    FourierCurve c = FourierCurve::circle(1.0, {}, 6);
    c.a[k] = 0.3;
    c.b[k] = -0.1;
    CHECK(constrained_quadratic_form(c) == doctest::Approx(kPi * 0.1 * coef(k)).epsilon(1e-13));
  }
  // The unconstrained form agrees with the constrained one once a0 fixes the area.
  const FourierCurve m = pure_mode(3, 0.01);
  CHECK(std::abs(taylor_elastica_deficit(m) - constrained_quadratic_form(m)) < 1e-9);

  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    FourierCurve c = random_small(seed, 0.05);
    c.a[0] = c.a[1] = c.b[1] = 0.0;
    double tail = 0.0;
    for (int k = 2; k <= 8; ++k) tail += c.a[k] * c.a[k] + c.b[k] * c.b[k];
    CHECK(constrained_quadratic_form(c) >= 7.5 * kPi * tail * (1 - 1e-12));
  }
}

TEST_CASE("exact deficits approach the quadratic form") {
  for (int k = 2; k <= 5; ++k) {
    CAPTURE(k);
    for (double t : {1e-3, 1e-4}) {
      CAPTURE(t);
      const FourierCurve c = pure_mode(k, t, 2048);
      const double exact = (elastica_energy(c) - kTwoPi) / (t * t);
      const double want = kPi * coef(k);
      CHECK(std::abs(exact / want - 1) <= (t > 5e-4 ? 2e-2 : 2e-4));
    }
  }
  // Richardson limit of the k = 2 elastica and perimeter coefficients.
  auto W = [](double t) { return (elastica_energy(pure_mode(2, t, 2048)) - kTwoPi) / (t * t); };
  auto P = [](double t) { return (perimeter(pure_mode(2, t, 2048)) - kTwoPi) / (t * t); };
  CHECK(richardson(W(1e-2), W(5e-3), 2) == doctest::Approx(7.5 * kPi).epsilon(1e-4));
  CHECK(richardson(P(1e-2), P(5e-3), 2) == doctest::Approx(1.5 * kPi).epsilon(1e-4));
  CHECK(P(1e-3) == doctest::Approx(1.5 * kPi).epsilon(1e-2));
  const FourierCurve m = pure_mode(2, 1e-3);
  CHECK(taylor_perimeter_deficit(m) / 1e-6 == doctest::Approx(1.5 * kPi).epsilon(1e-5));
  CHECK(richardson(4.0, 1.0, 2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("deficit over asymmetry for the k = 2 family") {
  // |E delta B| ~ int |t cos 2 theta| = 4 t, so the ratio tends to 7.5 pi / (4 / pi)^2.
  const double limit = 7.5 * kPi * kPi * kPi / 16.0;
  auto ratio = [](double t) {
    const FourierCurve c = pure_mode(2, t, 2048);
    const double a = asymmetry(c).value / kPi;
    return (elastica_energy(c) - kTwoPi) / (a * a);
  };
  CHECK(std::abs(ratio(1e-2) / limit - 1) < 2e-2);
  CHECK(std::abs(ratio(1e-3) / limit - 1) < 2e-3);
}

TEST_CASE("random deficit experiment") {
  DeficitConfig cfg;
  cfg.trials = 30;
  const DeficitExperiment e = deficit_experiment(cfg);
  CHECK(e.samples.size() == 30);
  CHECK(e.all_positive);
  for (const DeficitSample& s : e.samples) {
    CHECK(s.exact_deficit > 0.0);
    CHECK(s.perimeter_deficit >= 0.0);
    CHECK(s.ratio_c0 > 0.0);
    CHECK(s.ratio_c1 > 0.0);
    CHECK(s.ratio_c0 >= e.c0_envelope);
  }
  for (std::size_t i = 1; i < e.samples.size(); ++i) CHECK(e.samples[i].trial > e.samples[i - 1].trial);
  CHECK(e.c0_q05 >= e.c0_envelope);
  const DeficitExperiment again = deficit_experiment(cfg);
  CHECK(deficit_csv(again.samples) == deficit_csv(e.samples));
  std::istringstream csv(deficit_csv(e.samples));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,deficit,prediction,asymmetry_sq,perimeter_deficit,ratio_c0,ratio_c1");
  cfg.trials = 0;
  CHECK_THROWS_AS(deficit_experiment(cfg), InvalidInput);
}
