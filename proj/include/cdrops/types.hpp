#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cdrops {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Point or displacement; planar code ignores `z`.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(Point p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

/// Rejected input: violated precondition or invariant. Maps to CLI exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or solver could not reach its target. Maps to CLI exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iteration budget ran out before convergence. Maps to CLI exit code 4.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace cdrops
