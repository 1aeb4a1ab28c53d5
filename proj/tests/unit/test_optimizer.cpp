#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "cdrops/annulus.hpp"
#include "cdrops/geometry.hpp"
#include "cdrops/optimizer.hpp"

using namespace cdrops;
using namespace cdrops::optim;

namespace {

constexpr double kR005 = 4.418000406416626953;  // r_lambda at lambda = 0.05

EnergyParams params(double lambda, double Q, double alpha) {
  EnergyParams p;
  p.lambda = lambda;
  p.Q = Q;
  p.alpha = alpha;
  return p;
}

FourierCurve bumped_ball() {
  FourierCurve c = FourierCurve::circle(1.0, {}, 6, 256);
  c.a[2] = 0.1;
  c.b[3] = 0.03;
  return c;
}

FourierCurve rotated(const FourierCurve& c, double psi) {
  FourierCurve r = c;
  for (int k = 1; k <= c.modes(); ++k) {
    r.a[k] = c.a[k] * std::cos(k * psi) - c.b[k] * std::sin(k * psi);
    r.b[k] = c.a[k] * std::sin(k * psi) + c.b[k] * std::cos(k * psi);
  }
  return r;
}

void check_monotone(const OptimResult& r) {
  for (std::size_t i = 1; i < r.trajectory.size(); ++i)
    CHECK(r.trajectory[i].energy <= r.trajectory[i - 1].energy + 1e-12 * std::abs(r.trajectory[i - 1].energy));
}

OptimShape random_state(std::uint64_t seed) {
  std::uint64_t s = seed * 0x9E3779B97F4A7C15ULL + 7;
  auto next = [&] {
    s ^= s >> 12, s ^= s << 25, s ^= s >> 27;
    return static_cast<double>((s * 0x2545F4914F6CDD1DULL) >> 11) * 0x1.0p-53 - 0.5;
  };
  OptimShape shape;
  shape.outer = FourierCurve::circle(1.0 + 0.5 * next(), {}, 6, 256);
  for (int k = 1; k <= 6; ++k) shape.outer.a[k] = 0.1 * next() / k, shape.outer.b[k] = 0.1 * next() / k;
  if (seed % 2 == 0) {
    shape.topology = Topology::Annulus;
    shape.inner = FourierCurve::circle(0.4 * shape.outer.base_radius, {}, 6, 256);
    for (int k = 1; k <= 6; ++k) shape.inner.a[k] = 0.05 * next() / k, shape.inner.b[k] = 0.05 * next() / k;
    shape.offset = {0.05 * next(), 0.05 * next(), 0.0};
    shape.inner.center = shape.offset;
  }
  return shape;
}

}  // namespace

TEST_CASE("round ball is already critical") {
  for (double lambda : {0.1, 1.0, 7.0}) {
    const OptimResult r = minimize_ball_topology(FourierCurve::circle(1.0, {}, 6, 256), params(lambda, 0.0, 1.5));
    CHECK(r.converged);
    CHECK(r.final_state.iteration == 0);
    CHECK(r.final_state.energy == doctest::Approx(kTwoPi * (lambda + 1)).epsilon(1e-13));
  }
  OptimShape round;
  round.outer = FourierCurve::circle(1.0, {}, 6, 256);
  CHECK(shape_gradient_max(round) <= 1e-10);
}

TEST_CASE("bumped ball relaxes to the disk") {
  const OptimResult r = minimize_ball_topology(bumped_ball(), params(1.0, 0.0, 1.5));
  CHECK(r.converged);
  CHECK(r.classification_hint == "ball");
  CHECK(r.distance_to_primitive <= 1e-4);
  CHECK(std::abs(area(r.final_state.shape.outer) - kPi) <= 1e-10);
  CHECK(r.final_state.energy == doctest::Approx(4 * kPi).epsilon(1e-10));
  check_monotone(r);

  std::ostringstream header;
  header << trajectory_csv(r.trajectory).substr(0, trajectory_csv(r.trajectory).find('\n'));
  CHECK(header.str() == "iteration,energy,grad_norm,step,offset");
}

TEST_CASE("rotating the start rotates the run") {
  const OptimResult a = minimize_ball_topology(bumped_ball(), params(1.0, 0.0, 1.5));
  const OptimResult b = minimize_ball_topology(rotated(bumped_ball(), 0.7), params(1.0, 0.0, 1.5));
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i)
    CHECK(std::abs(a.trajectory[i].energy - b.trajectory[i].energy) <= 1e-10);
}

TEST_CASE("charged ball relaxes to the disk") {
  const OptimResult r = minimize_ball_topology(bumped_ball(), params(1.0, 1e-3, 1.5));
  CHECK(r.converged);
  CHECK(r.distance_to_primitive <= 1e-3);
  check_monotone(r);
}

TEST_CASE("perturbed annulus recenters at r_lambda") {
  const double r0 = 1.1 * kR005;
  FourierCurve outer = FourierCurve::circle(std::sqrt(1 + r0 * r0), {}, 4, 256);
  FourierCurve inner = FourierCurve::circle(r0, {}, 4, 256);
  outer.a[2] = inner.a[2] = 0.05;
  const OptimResult r = minimize_annulus_topology(outer, inner, {}, params(0.05, 0.0, 1.5));
  CHECK(r.converged);
  CHECK(r.classification_hint == "centered annulus");
  CHECK(std::abs(inner_mean_radius(r.final_state.shape) - kR005) <= 1e-3);
  CHECK(norm(r.final_state.shape.offset) <= 1e-4);
  CHECK(std::abs(r.final_state.energy / annulus::f_lambda(0.05, kR005) - 1) <= 1e-6);
  const OptimShape& s = r.final_state.shape;
  CHECK(std::abs(area(s.outer) - area(s.inner) - kPi) <= 1e-10);
  CHECK(nesting_gap(s) > 1e-3 * s.outer.base_radius);
  check_monotone(r);
}

TEST_CASE("charged annulus matches the one-dimensional optimum") {
  const double r0 = 1.1 * kR005;
  FourierCurve outer = FourierCurve::circle(std::sqrt(1 + r0 * r0), {}, 4, 256);
  FourierCurve inner = FourierCurve::circle(r0, {}, 4, 256);
  outer.a[2] = inner.a[2] = 0.05;
  const OptimResult r = minimize_annulus_topology(outer, inner, {}, params(0.05, 1e-4, 1.0));
  const double want = annulus::optimal_charged_annulus(0.05, 1e-4, 1.0).r_star;
  MESSAGE("stop: " << r.stop_reason << ", r = " << inner_mean_radius(r.final_state.shape) << ", want " << want);
  CHECK(std::abs(inner_mean_radius(r.final_state.shape) - want) <= 1e-3);
  CHECK(norm(r.final_state.shape.offset) <= 1e-4);
  check_monotone(r);
}

TEST_CASE("offset hole drifts back to the center") {
  const double r0 = 1.157618180887;  // optimal charged radius at lambda = Q = alpha = 1
  const FourierCurve outer = FourierCurve::circle(std::sqrt(1 + r0 * r0), {}, 2, 256);
  const FourierCurve inner = FourierCurve::circle(r0, {0.2, 0.0, 0.0}, 2, 256);
  OptimBudget b;
  b.max_iterations = 60;
  b.round_boundaries = true;
  b.lbfgs_memory = 0;
  const OptimResult r = minimize_annulus_topology(outer, inner, {0.2, 0.0, 0.0}, params(1.0, 1.0, 1.0), b);
  REQUIRE(r.trajectory.size() > 10);
  CHECK(r.trajectory.front().offset == doctest::Approx(0.2));
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) CHECK(r.trajectory[i].offset <= r.trajectory[i - 1].offset);
  CHECK(r.trajectory.back().offset < 1e-3);
  check_monotone(r);
}

TEST_CASE("analytic gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    const OptimShape s = random_state(seed);
    CHECK_NOTHROW(s.validate());
    CHECK(gradient_check(s) <= 1e-5);
  }
}

TEST_CASE("invalid starts") {
  FourierCurve bad = FourierCurve::circle(1.0, {}, 4, 256);
  bad.a[2] = -1.5;
  CHECK_THROWS_AS(minimize_ball_topology(bad, params(1.0, 0.0, 1.5)), InvalidInput);
  const FourierCurve outer = FourierCurve::circle(1.0, {}, 4, 256);
  const FourierCurve inner = FourierCurve::circle(0.9, {0.2, 0.0, 0.0}, 4, 256);
  CHECK_THROWS_AS(minimize_annulus_topology(outer, inner, {0.2, 0.0, 0.0}, params(1.0, 0.0, 1.5)), InvalidInput);
  OptimBudget b;
  b.max_iterations = 2;
  const OptimResult r = minimize_ball_topology(bumped_ball(), params(1.0, 0.0, 1.5), b);
  CHECK_FALSE(r.converged);
  CHECK(r.stop_reason == "budget");
}
