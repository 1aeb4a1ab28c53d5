#include "cdrops/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "cdrops/quadrature.hpp"

namespace cdrops {

namespace {

// cos(k t), sin(k t) for k = 0..K by the angle-addition recurrence.
template <class Fn>
void for_each_mode(double theta, int K, Fn&& fn) {
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double ck = 1.0;
  double sk = 0.0;
  for (int k = 0; k <= K; ++k) {
    fn(k, ck, sk);
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
}

double boundary_bounding_radius(const Boundary& b) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) return bounding_radius(s);
        else return s.radius;
      },
      b);
}

double boundary_inscribed_radius(const Boundary& b) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) return inscribed_radius(s);
        else return s.radius;
      },
      b);
}

Point boundary_center(const Boundary& b) {
  return std::visit([](const auto& s) { return s.center; }, b);
}

double boundary_volume(const Boundary& b) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) return area(s);
        else return volume(s);
      },
      b);
}

double boundary_perimeter(const Boundary& b) {
  return std::visit([](const auto& s) { return perimeter(s); }, b);
}

}  // namespace

// ---- FourierCurve -----------------------------------------------------------

FourierCurve FourierCurve::circle(double radius, Point center, int modes, int n_samples) {
  FourierCurve c;
  c.base_radius = radius;
  c.center = center;
  c.a.assign(modes + 1, 0.0);
  c.b.assign(modes + 1, 0.0);
  c.n_samples = n_samples;
  return c;
}

double FourierCurve::phi(double theta) const {
  double v = 0.0;
  for_each_mode(theta, modes(), [&](int k, double ck, double sk) { v += a[k] * ck + (k > 0 ? b[k] * sk : 0.0); });
  return v;
}

double FourierCurve::dphi(double theta) const {
  double v = 0.0;
  for_each_mode(theta, modes(), [&](int k, double ck, double sk) { v += k * (b[k] * ck - a[k] * sk); });
  return v;
}

double FourierCurve::ddphi(double theta) const {
  double v = 0.0;
  for_each_mode(theta, modes(), [&](int k, double ck, double sk) { v -= double(k) * k * (a[k] * ck + b[k] * sk); });
  return v;
}

void FourierCurve::validate() const {
  require(std::isfinite(base_radius) && base_radius > 0.0, "base_radius must be positive");
  require(a.size() == b.size(), "coeffs: a and b must have the same length");
  require(a.size() >= 3, "coeffs: at least modes 0..2 are required (K >= 2)");
  const int K = modes();
  require(n_samples >= 4 * K + 4, "n_samples must be at least 4K+4 = " + std::to_string(4 * K + 4));
  for (std::size_t k = 0; k < a.size(); ++k)
    require(std::isfinite(a[k]) && std::isfinite(b[k]), "coeffs must be finite");
  require(std::isfinite(center.x) && std::isfinite(center.y), "center must be finite");
  const CurveSamples s = sample(*this);
  for (double p : s.phi)
    if (!(1.0 + p > 0.0)) throw InvalidInput("curve is not a radial graph: 1 + phi <= 0 at a sample point");
}

CurveSamples sample(const FourierCurve& curve) {
  const int n = curve.n_samples;
  const int K = curve.modes();
  CurveSamples s;
  s.theta.resize(n);
  s.phi.assign(n, 0.0);
  s.dphi.assign(n, 0.0);
  s.ddphi.assign(n, 0.0);
  // Exact cos/sin table of 2 pi m / n; mode k at node j uses index k*j mod n.
  std::vector<double> ct(n), st(n);
  for (int m = 0; m < n; ++m) {
    ct[m] = std::cos(kTwoPi * m / n);
    st[m] = std::sin(kTwoPi * m / n);
  }
  for (int j = 0; j < n; ++j) {
    s.theta[j] = kTwoPi * j / n;
    double p = curve.a[0];
    double dp = 0.0;
    double ddp = 0.0;
    for (int k = 1; k <= K; ++k) {
      const int idx = static_cast<int>((static_cast<long long>(k) * j) % n);
      const double ck = ct[idx];
      const double sk = st[idx];
      const double ak = curve.a[k];
      const double bk = curve.b[k];
      p += ak * ck + bk * sk;
      dp += k * (bk * ck - ak * sk);
      ddp -= double(k) * k * (ak * ck + bk * sk);
    }
    s.phi[j] = p;
    s.dphi[j] = dp;
    s.ddphi[j] = ddp;
  }
  return s;
}

// ---- primitives ---------------------------------------------------------------

void Ball::validate() const {
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  require(std::isfinite(radius) && radius > 0.0, "ball radius must be positive");
}

void AnnulusSpec::validate() const {
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  require(std::isfinite(r_in) && r_in > 0.0, "r_in must be positive");
  require(std::isfinite(r_out) && r_out > 0.0, "r_out must be positive");
  require(r_in < r_out, "annulus volume must be positive (r_in < r_out)");
  require(r_in + norm(offset) <= r_out, "inner ball must lie inside the outer ball (r_in + |offset| <= r_out)");
}

Configuration Configuration::from_annulus(const AnnulusSpec& annulus, Point center) {
  Configuration c;
  c.dim = annulus.dim;
  c.components.push_back(Component{Ball{annulus.dim, center, annulus.r_out},
                                    {Ball{annulus.dim, center + annulus.offset, annulus.r_in}}});
  return c;
}

void Configuration::validate() const {
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  require(!components.empty(), "configuration needs at least one component");
  auto check_boundary = [&](const Boundary& b) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, FourierCurve>) {
            require(dim == 2, "Fourier curves are planar; configuration dim must be 2");
          } else {
            require(s.dim == dim, "ball dimension does not match configuration dim");
          }
          s.validate();
        },
        b);
  };
  for (const auto& comp : components) {
    check_boundary(comp.outer);
    const Point co = boundary_center(comp.outer);
    const double inner_free = boundary_inscribed_radius(comp.outer);
    for (std::size_t i = 0; i < comp.holes.size(); ++i) {
      check_boundary(comp.holes[i]);
      const Point ch = boundary_center(comp.holes[i]);
      const double rh = boundary_bounding_radius(comp.holes[i]);
      require(norm(ch - co) + rh < inner_free, "hole is not strictly inside its component's outer boundary");
      for (std::size_t j = 0; j < i; ++j) {
        const double d = norm(ch - boundary_center(comp.holes[j]));
        require(d > rh + boundary_bounding_radius(comp.holes[j]), "holes of a component overlap");
      }
    }
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double d = norm(boundary_center(components[i].outer) - boundary_center(components[j].outer));
      const double r = boundary_bounding_radius(components[i].outer) + boundary_bounding_radius(components[j].outer);
      require(d > r, "components " + std::to_string(j) + " and " + std::to_string(i) + " are not disjoint");
    }
  }
}

int shape_dim(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) return 2;
        else return s.dim;
      },
      shape);
}

double MassBudget::reference() const { return dim == 3 ? 4.0 * kPi / 3.0 : kPi; }

// ---- measures ---------------------------------------------------------------

double area(const FourierCurve& curve) {
  const CurveSamples s = sample(curve);
  double sum = 0.0;
  for (double p : s.phi) {
    if (!(1.0 + p > 0.0)) throw InvalidInput("curve is not a radial graph: 1 + phi <= 0");
    sum += (1.0 + p) * (1.0 + p);
  }
  const double R = curve.base_radius;
  return 0.5 * R * R * sum * kTwoPi / curve.n_samples;
}

double volume(const Ball& ball) {
  return ball.dim == 3 ? 4.0 * kPi / 3.0 * std::pow(ball.radius, 3) : kPi * ball.radius * ball.radius;
}

double volume(const AnnulusSpec& annulus) {
  if (annulus.dim == 3) return 4.0 * kPi / 3.0 * (std::pow(annulus.r_out, 3) - std::pow(annulus.r_in, 3));
  return kPi * (annulus.r_out * annulus.r_out - annulus.r_in * annulus.r_in);
}

double volume(const Configuration& config) {
  double v = 0.0;
  for (const auto& comp : config.components) {
    v += boundary_volume(comp.outer);
    for (const auto& h : comp.holes) v -= boundary_volume(h);
  }
  return v;
}

double volume(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) return area(s);
        else return volume(s);
      },
      shape);
}

double perimeter(const FourierCurve& curve) {
  const CurveSamples s = sample(curve);
  double sum = 0.0;
  for (std::size_t j = 0; j < s.phi.size(); ++j) {
    const double r = 1.0 + s.phi[j];
    sum += std::sqrt(s.dphi[j] * s.dphi[j] + r * r);
  }
  return curve.base_radius * sum * kTwoPi / curve.n_samples;
}

double perimeter(const Ball& ball) {
  return ball.dim == 3 ? 4.0 * kPi * ball.radius * ball.radius : kTwoPi * ball.radius;
}

double perimeter(const AnnulusSpec& annulus) {
  if (annulus.dim == 3) return 4.0 * kPi * (annulus.r_in * annulus.r_in + annulus.r_out * annulus.r_out);
  return kTwoPi * (annulus.r_in + annulus.r_out);
}

double perimeter(const Configuration& config) {
  double p = 0.0;
  for (const auto& comp : config.components) {
    p += boundary_perimeter(comp.outer);
    for (const auto& h : comp.holes) p += boundary_perimeter(h);
  }
  return p;
}

double perimeter(const Shape& shape) {
  return std::visit([](const auto& s) { return perimeter(s); }, shape);
}

Point barycenter(const FourierCurve& curve) {
  const CurveSamples s = sample(curve);
  double mx = 0.0;
  double my = 0.0;
  double m0 = 0.0;
  for (std::size_t j = 0; j < s.phi.size(); ++j) {
    const double r = 1.0 + s.phi[j];
    const double r3 = r * r * r;
    mx += r3 * std::cos(s.theta[j]);
    my += r3 * std::sin(s.theta[j]);
    m0 += r * r;
  }
  // First moment R^3/3 * int (1+phi)^3 e^{i theta}, area R^2/2 * int (1+phi)^2.
  const double R = curve.base_radius;
  const double scale = (R / 3.0) / (0.5 * m0);
  return {curve.center.x + scale * mx, curve.center.y + scale * my, 0.0};
}

double bounding_radius(const FourierCurve& curve) {
  FourierCurve fine = curve;
  fine.n_samples = 4 * curve.n_samples;
  const CurveSamples s = sample(fine);
  const double mx = *std::max_element(s.phi.begin(), s.phi.end());
  return curve.base_radius * (1.0 + mx) * (1.0 + 1e-9);
}

double inscribed_radius(const FourierCurve& curve) {
  FourierCurve fine = curve;
  fine.n_samples = 4 * curve.n_samples;
  const CurveSamples s = sample(fine);
  const double mn = *std::min_element(s.phi.begin(), s.phi.end());
  return curve.base_radius * (1.0 + mn) * (1.0 - 1e-9);
}

bool contains(const FourierCurve& curve, Point p) {
  const double dx = p.x - curve.center.x;
  const double dy = p.y - curve.center.y;
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return true;
  return r < curve.radius_at(std::atan2(dy, dx));
}

bool contains(const Ball& ball, Point p) { return norm(p - ball.center) < ball.radius; }

bool contains(const AnnulusSpec& annulus, Point p) {
  return norm(p) < annulus.r_out && norm(p - annulus.offset) >= annulus.r_in;
}

// ---- comparisons ------------------------------------------------------------

double symmetric_difference(const FourierCurve& a, const FourierCurve& b) {
  const double scale = std::max(a.base_radius, b.base_radius);
  if (norm(a.center - b.center) > 1e-12 * scale)
    throw InvalidInput("symmetric_difference: curves must share the same center (translate first)");
  const double Ra2 = a.base_radius * a.base_radius;
  const double Rb2 = b.base_radius * b.base_radius;
  auto F = [&](double t) {
    const double pa = 1.0 + a.phi(t);
    const double pb = 1.0 + b.phi(t);
    return Ra2 * pa * pa - Rb2 * pb * pb;
  };
  return 0.5 * quad::integrate_abs_periodic(F, std::max(a.n_samples, b.n_samples));
}

double symmetric_difference(const FourierCurve& curve, const Ball& disk, int fallback_resolution) {
  const double dx = disk.center.x - curve.center.x;
  const double dy = disk.center.y - curve.center.y;
  const double d2 = dx * dx + dy * dy;
  const double R = disk.radius;
  if (d2 >= R * R * (1.0 - 1e-9)) return symmetric_difference_raster(curve, disk, fallback_resolution);
  const double Rc2 = curve.base_radius * curve.base_radius;
  // Ray from the curve center meets the circle at t = d.e + sqrt((d.e)^2 - |d|^2 + R^2).
  auto F = [&](double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double de = dx * c + dy * s;
    const double tb = de + std::sqrt(de * de - d2 + R * R);
    const double pc = 1.0 + curve.phi(t);
    return Rc2 * pc * pc - tb * tb;
  };
  return 0.5 * quad::integrate_abs_periodic(F, curve.n_samples);
}

double symmetric_difference_raster(const FourierCurve& curve, const Ball& disk, int resolution) {
  require(resolution >= 16, "raster resolution too small");
  const double rc = bounding_radius(curve);
  const double rin = inscribed_radius(curve);
  const double x0 = std::min(curve.center.x - rc, disk.center.x - disk.radius);
  const double x1 = std::max(curve.center.x + rc, disk.center.x + disk.radius);
  const double y0 = std::min(curve.center.y - rc, disk.center.y - disk.radius);
  const double y1 = std::max(curve.center.y + rc, disk.center.y + disk.radius);
  const double side = std::max(x1 - x0, y1 - y0) * (1.0 + 1e-6);
  const double h = side / resolution;
  const double R2 = disk.radius * disk.radius;
  long long count = 0;
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = y0 + (iy + 0.5) * h;
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = x0 + (ix + 0.5) * h;
      const double ddx = x - disk.center.x;
      const double ddy = y - disk.center.y;
      const bool in_disk = ddx * ddx + ddy * ddy < R2;
      const double cx = x - curve.center.x;
      const double cy = y - curve.center.y;
      const double r = std::hypot(cx, cy);
      bool in_curve;
      if (r < rin) in_curve = true;
      else if (r > rc) in_curve = false;
      else in_curve = r < curve.radius_at(std::atan2(cy, cx));
      if (in_disk != in_curve) ++count;
    }
  }
  return static_cast<double>(count) * h * h;
}

AsymmetryResult asymmetry(const FourierCurve& curve, double translation_tol_rel) {
  curve.validate();
  AsymmetryResult res;
  const double R = std::sqrt(area(curve) / kPi);
  res.ball_radius = R;
  auto objective = [&](Point x) {
    ++res.evaluations;
    return symmetric_difference(curve, Ball{2, x, R});
  };
  const Point seed = barycenter(curve);
  Point best = seed;
  double best_val = objective(seed);
  const double spacing = R / 4.0;
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      if (i == 0 && j == 0) continue;
      const Point x{seed.x + i * spacing, seed.y + j * spacing, 0.0};
      const double v = objective(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    }
  }
  // Compass search with step halving down to the translation tolerance.
  static constexpr std::array<std::array<double, 2>, 8> dirs{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  double step = spacing / 2.0;
  const double tol = translation_tol_rel * R;
  while (step > tol) {
    Point cand = best;
    double cand_val = best_val;
    for (const auto& d : dirs) {
      const Point x{best.x + step * d[0], best.y + step * d[1], 0.0};
      const double v = objective(x);
      if (v < cand_val) {
        cand_val = v;
        cand = x;
      }
    }
    if (cand_val < best_val) {
      best_val = cand_val;
      best = cand;
    } else {
      step *= 0.5;
    }
  }
  res.value = best_val;
  res.best_center = best;
  return res;
}

// ---- mass normalization -----------------------------------------------------

RescaledParams rescale_mass(const EnergyParams& params, const MassBudget& mass) {
  require(params.dim == 2 && mass.dim == 2, "rescale_mass is defined for dim = 2");
  require(std::isfinite(mass.m) && mass.m > 0.0, "mass must be positive");
  RescaledParams out;
  out.params = params;
  const double ratio = mass.m / kPi;
  out.params.lambda = params.lambda * ratio;
  out.params.Q = params.Q * std::pow(ratio, (3.0 + params.alpha) / 2.0);
  out.prefactor = std::sqrt(kPi / mass.m);
  return out;
}

EnergyParams unscale_mass(const EnergyParams& normalized, const MassBudget& mass) {
  require(normalized.dim == 2 && mass.dim == 2, "unscale_mass is defined for dim = 2");
  require(std::isfinite(mass.m) && mass.m > 0.0, "mass must be positive");
  EnergyParams out = normalized;
  const double ratio = mass.m / kPi;
  out.lambda = normalized.lambda / ratio;
  out.Q = normalized.Q / std::pow(ratio, (3.0 + normalized.alpha) / 2.0);
  return out;
}

}  // namespace cdrops
