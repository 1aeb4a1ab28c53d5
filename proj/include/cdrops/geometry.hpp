#pragma once

#include <variant>
#include <vector>

#include "cdrops/params.hpp"
#include "cdrops/types.hpp"

namespace cdrops {

/// Star-shaped planar boundary {center + R (1 + phi(theta)) e^{i theta}} with
///   phi(theta) = a[0] + sum_{k=1..K} a[k] cos(k theta) + b[k] sin(k theta).
/// `b[0]` is unused and kept at zero so both arrays index by mode.
struct FourierCurve {
  double base_radius = 1.0;
  Point center{};
  std::vector<double> a = std::vector<double>(3, 0.0);
  std::vector<double> b = std::vector<double>(3, 0.0);
  int n_samples = 1024;

  static FourierCurve circle(double radius, Point center = {}, int modes = 2, int n_samples = 1024);

  int modes() const { return static_cast<int>(a.size()) - 1; }

  double phi(double theta) const;
  double dphi(double theta) const;
  double ddphi(double theta) const;
  double radius_at(double theta) const { return base_radius * (1.0 + phi(theta)); }

  /// Throws InvalidInput when K < 2, n_samples < 4K + 4, R <= 0 or 1 + phi <= 0 on the grid.
  void validate() const;
};

/// phi and its first two derivatives on the uniform grid theta_j = 2 pi j / n.
struct CurveSamples {
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> dphi;
  std::vector<double> ddphi;
};

CurveSamples sample(const FourierCurve& curve);

/// Round ball (disk in 2D).
struct Ball {
  int dim = 2;
  Point center{};
  double radius = 1.0;

  void validate() const;
};

/// B_{r_out} minus B_{r_in}(offset); centered at the origin.
struct AnnulusSpec {
  int dim = 2;
  double r_in = 0.5;
  double r_out = 1.0;
  Point offset{};

  void validate() const;
};

using Boundary = std::variant<FourierCurve, Ball>;

struct Component {
  Boundary outer;
  std::vector<Boundary> holes;
};

/// Finite union of components with holes.
struct Configuration {
  int dim = 2;
  std::vector<Component> components;

  static Configuration from_annulus(const AnnulusSpec& annulus, Point center = {});

  /// Pairwise disjointness (bounding circles) and holes strictly inside their outer boundary.
  void validate() const;
};

using Shape = std::variant<FourierCurve, Ball, AnnulusSpec, Configuration>;

int shape_dim(const Shape& shape);

struct MassBudget {
  double m = kPi;
  int dim = 2;

  /// |B_1| in the working dimension.
  double reference() const;
};

// ---- measures ---------------------------------------------------------------

double area(const FourierCurve& curve);
double volume(const Ball& ball);
double volume(const AnnulusSpec& annulus);
double volume(const Configuration& config);
double volume(const Shape& shape);

double perimeter(const FourierCurve& curve);
double perimeter(const Ball& ball);
double perimeter(const AnnulusSpec& annulus);
double perimeter(const Configuration& config);
double perimeter(const Shape& shape);

Point barycenter(const FourierCurve& curve);

/// Radius of a circle about the curve center enclosing the curve.
double bounding_radius(const FourierCurve& curve);
/// Largest r such that B_r(center) lies inside the curve.
double inscribed_radius(const FourierCurve& curve);

bool contains(const FourierCurve& curve, Point p);
bool contains(const Ball& ball, Point p);
bool contains(const AnnulusSpec& annulus, Point p);

// ---- comparisons ------------------------------------------------------------

/// |A delta B| for two radial graphs about the same center.
double symmetric_difference(const FourierCurve& a, const FourierCurve& b);

/// |E delta disk|. Exact polar integration when the disk contains the curve
/// center; otherwise falls back to rasterization at `fallback_resolution`^2.
double symmetric_difference(const FourierCurve& curve, const Ball& disk, int fallback_resolution = 2048);

/// Pixel-counting estimate of |E delta disk| over a square covering both sets.
double symmetric_difference_raster(const FourierCurve& curve, const Ball& disk, int resolution);

struct AsymmetryResult {
  double value = 0.0;    // min_x |E delta B_R(x)| with |B_R| = |E|
  Point best_center{};
  double ball_radius = 0.0;
  int evaluations = 0;
};

AsymmetryResult asymmetry(const FourierCurve& curve, double translation_tol_rel = 1e-6);

// ---- mass normalization -----------------------------------------------------

struct RescaledParams {
  EnergyParams params;
  double prefactor = 1.0;  // min over mass m = prefactor * min over mass pi
};

/// Parameters equivalent to `params` at mass |B_1| (planar only).
RescaledParams rescale_mass(const EnergyParams& params, const MassBudget& mass);

/// Inverse of rescale_mass: recover the parameters at mass m.
EnergyParams unscale_mass(const EnergyParams& normalized, const MassBudget& mass);

}  // namespace cdrops
