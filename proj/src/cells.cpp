#include "cdrops/cells.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cdrops/kernels.hpp"
#include "cdrops/quadrature.hpp"

namespace cdrops::cells {

namespace {

constexpr int kExactRange = 16;  // box interactions summed exactly out to this |Delta|_inf

std::int64_t key(int i, int j) {
  return (static_cast<std::int64_t>(i) << 32) ^ static_cast<std::int64_t>(static_cast<std::uint32_t>(j));
}

// Bilinear tent factor times the kernel over the unit square [s,s+1]x[t,t+1]
// when the singular point (-m,-n) is one of its corners: polar coordinates
// about that corner with the radial integral in closed form.
double corner_square(double alpha, int m, int n, int s, int t) {
  const double cx = -m;
  const double cy = -n;
  const double sx = (cx == s) ? 1.0 : -1.0;
  const double sy = (cy == t) ? 1.0 : -1.0;
  const double su = (s == -1) ? -1.0 : 1.0;
  const double sv = (t == -1) ? -1.0 : 1.0;
  const double A0 = 1.0 - su * cx;
  const double B0 = 1.0 - sv * cy;
  auto f = [&](double th) {
    const double c = std::cos(th);
    const double sn = std::sin(th);
    const double L = 1.0 / std::max(c, sn);
    const double A1 = -su * sx * c;
    const double B1 = -sv * sy * sn;
    const double c0 = A0 * B0;
    const double c1 = A0 * B1 + A1 * B0;
    const double c2 = A1 * B1;
    const double La = std::pow(L, alpha);
    return c0 * La / alpha + c1 * La * L / (alpha + 1.0) + c2 * La * L * L / (alpha + 2.0);
  };
  const auto& rule = quad::gauss_legendre(30);
  std::vector<quad::Interval> panels;
  for (int k = 0; k < 4; ++k) {
    panels.emplace_back(k * kPi / 16.0, (k + 1) * kPi / 16.0);
    panels.emplace_back(kPi / 4.0 + k * kPi / 16.0, kPi / 4.0 + (k + 1) * kPi / 16.0);
  }
  return quad::integrate_panels(f, panels, rule);
}

double smooth_square(double alpha, int m, int n, int s, int t) {
  const double p = 0.5 * (alpha - 2.0);
  const auto& rule = quad::gauss_legendre(16);
  const int sub = 4;
  const double hs = 1.0 / sub;
  double total = 0.0;
  for (int a = 0; a < sub; ++a) {
    for (int b = 0; b < sub; ++b) {
      const double u0 = s + (a + 0.5) * hs;
      const double v0 = t + (b + 0.5) * hs;
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = u0 + 0.5 * hs * rule.nodes[i];
        const double tu = 1.0 - std::abs(u);
        double row = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          const double v = v0 + 0.5 * hs * rule.nodes[j];
          const double X = m + u;
          const double Y = n + v;
          row += rule.weights[j] * (1.0 - std::abs(v)) * std::pow(X * X + Y * Y, p);
        }
        acc += rule.weights[i] * tu * row;
      }
      total += acc * 0.25 * hs * hs;
    }
  }
  return total;
}

// Closed-form tail of sum_{|Delta|_inf > R} (alpha-2)^2/12 |Delta|^(alpha-4),
// replaced by the integral outside the square of half side R + 1/2.
double far_tail(double alpha) {
  const double a = kExactRange + 0.5;
  auto f = [&](double th) { return std::pow(a / std::cos(th), alpha - 2.0) / (2.0 - alpha); };
  const double integral = 8.0 * quad::integrate_graded(f, 0.0, kPi / 4.0, false, false, 1, 30);
  return (alpha - 2.0) * (alpha - 2.0) / 12.0 * integral;
}

KernelTable build_table(double alpha) {
  KernelTable t;
  t.alpha = alpha;
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n) t.near[m + 2][n + 2] = box_interaction(alpha, std::abs(m), std::abs(n));
  const double p = 0.5 * (alpha - 2.0);
  double bias = 0.0;
  for (int m = 0; m <= kExactRange; ++m) {
    for (int n = 0; n <= m; ++n) {
      if (m <= 2) continue;
      const double diff = box_interaction(alpha, m, n) - std::pow(double(m) * m + double(n) * n, p);
      int mult = (n == 0) ? 4 : 8;
      if (n == m) mult = 4;
      bias += mult * diff;
    }
  }
  t.far_bias = bias + far_tail(alpha);
  return t;
}

// Fraction of an h x h cell on the inner side of a straight edge at signed
// distance s from its center; a and b are the cell sides projected on the normal.
double half_plane_fraction(double s, double a, double b, double h) {
  if (a < b) std::swap(a, b);
  const double t = s + 0.5 * (a + b);
  if (t <= 0.0) return 0.0;
  if (t >= a + b) return 1.0;
  if (b < 1e-9 * h) return std::clamp(t / a, 0.0, 1.0);
  if (t <= b) return t * t / (2.0 * a * b);
  if (t <= a) return (t - 0.5 * b) / a;
  const double u = a + b - t;
  return 1.0 - u * u / (2.0 * a * b);
}

// Local geometry of one boundary for fast coverage queries.
struct BoundaryProbe {
  const Boundary* b;
  Point center;
  double r_lo;
  double r_hi;

  explicit BoundaryProbe(const Boundary& bd) : b(&bd) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          center = s.center;
          if constexpr (std::is_same_v<T, FourierCurve>) {
            r_lo = inscribed_radius(s);
            r_hi = bounding_radius(s);
          } else {
            r_lo = r_hi = s.radius;
          }
        },
        bd);
  }

  double coverage(Point q, double h) const {
    const double dx = q.x - center.x;
    const double dy = q.y - center.y;
    const double r = std::hypot(dx, dy);
    if (r < r_lo - 2.0 * h) return 1.0;
    if (r > r_hi + 2.0 * h) return 0.0;
    double s, nx, ny;
    if (const auto* curve = std::get_if<FourierCurve>(b)) {
      const double th = std::atan2(dy, dx);
      const double R = curve->base_radius;
      const double rho = R * (1.0 + curve->phi(th));
      const double drho = R * curve->dphi(th);
      const double len = std::hypot(rho, drho);
      const double c = std::cos(th);
      const double sn = std::sin(th);
      // outward normal (rho e_r - rho' e_theta) / len
      nx = (rho * c + drho * sn) / len;
      ny = (rho * sn - drho * c) / len;
      s = (rho - r) * rho / len;
    } else {
      const double R = std::get<Ball>(*b).radius;
      s = R - r;
      nx = r > 0.0 ? dx / r : 1.0;
      ny = r > 0.0 ? dy / r : 0.0;
    }
    return half_plane_fraction(s, h * std::abs(nx), h * std::abs(ny), h);
  }
};

// sum_i a_i sum_{0 < |Delta|_inf <= 2} b_{i+Delta} (box - point) + K(0) sum_i a_i b_i
double near_correction(const CellField& a, const CellField& b, const KernelTable& t) {
  const double p = 0.5 * (t.alpha - 2.0);
  double corr[5][5];
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n)
      corr[m + 2][n + 2] = (m == 0 && n == 0) ? t(0, 0) : t.near[m + 2][n + 2] - std::pow(double(m * m + n * n), p);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double acc = 0.0;
    for (int m = -2; m <= 2; ++m) {
      for (int n = -2; n <= 2; ++n) {
        const long j = b.find(a.ix()[i] + m, a.iy()[i] + n);
        if (j >= 0) acc += b.w()[j] * corr[m + 2][n + 2];
      }
    }
    total += a.w()[i] * acc;
  }
  return total;
}

}  // namespace

double box_interaction(double alpha, int m, int n) {
  double total = 0.0;
  for (int s = -1; s <= 0; ++s) {
    for (int t = -1; t <= 0; ++t) {
      const bool corner_x = (-m == s || -m == s + 1);
      const bool corner_y = (-n == t || -n == t + 1);
      total += (corner_x && corner_y) ? corner_square(alpha, m, n, s, t) : smooth_square(alpha, m, n, s, t);
    }
  }
  return total;
}

double self_interaction_polar(double alpha) {
  auto f = [&](double t) {
    return std::pow(1.0 + t * t, 0.5 * (alpha - 2.0)) *
           (1.0 / alpha - (1.0 + t) / (alpha + 1.0) + t / (alpha + 2.0));
  };
  return 8.0 * quad::integrate_graded(f, 0.0, 1.0, false, false, 1, 30);
}

double KernelTable::operator()(int m, int n) const {
  if (std::abs(m) <= 2 && std::abs(n) <= 2) return near[m + 2][n + 2] + ((m == 0 && n == 0) ? far_bias : 0.0);
  return std::pow(double(m) * m + double(n) * n, 0.5 * (alpha - 2.0));
}

const KernelTable& kernel_table(double alpha) {
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<KernelTable>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(alpha);
  if (it == cache.end()) it = cache.emplace(alpha, std::make_unique<KernelTable>(build_table(alpha))).first;
  return *it->second;
}

// ---- CellField --------------------------------------------------------------

void CellField::add(int i, int j, double dw) {
  const auto k = key(i, j);
  auto it = index_.find(k);
  if (it == index_.end()) {
    index_.emplace(k, w_.size());
    ix_.push_back(i);
    iy_.push_back(j);
    x_.push_back(i);
    y_.push_back(j);
    w_.push_back(dw);
  } else {
    w_[it->second] += dw;
  }
}

void CellField::add_region(const Boundary& b, double sign) {
  const BoundaryProbe probe(b);
  int i0, i1, j0, j1;
  cell_range(b, h_, anchor_, i0, i1, j0, j1);
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Point q{anchor_.x + h_ * i, anchor_.y + h_ * j, 0.0};
      const double c = probe.coverage(q, h_);
      if (c != 0.0) add(i, j, sign * c);
    }
  }
}

void CellField::prune(double tol) {
  CellField kept(h_, anchor_);
  for (std::size_t k = 0; k < w_.size(); ++k)
    if (std::abs(w_[k]) > tol) kept.add(ix_[k], iy_[k], w_[k]);
  *this = std::move(kept);
}

long CellField::find(int i, int j) const {
  auto it = index_.find(key(i, j));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

double CellField::area() const {
  double s = 0.0;
  for (double v : w_) s += v;
  return s * h_ * h_;
}

double coverage(const Boundary& b, Point q, double h) { return BoundaryProbe(b).coverage(q, h); }

std::vector<double> coverage(const Boundary& b, const std::vector<Point>& qs, double h) {
  const BoundaryProbe probe(b);
  std::vector<double> out(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) out[i] = probe.coverage(qs[i], h);
  return out;
}

void cell_range(const Boundary& b, double h, Point anchor, int& i0, int& i1, int& j0, int& j1) {
  const BoundaryProbe probe(b);
  const double ext = probe.r_hi + 2.0 * h;
  i0 = static_cast<int>(std::floor((probe.center.x - ext - anchor.x) / h));
  i1 = static_cast<int>(std::ceil((probe.center.x + ext - anchor.x) / h));
  j0 = static_cast<int>(std::floor((probe.center.y - ext - anchor.y) / h));
  j1 = static_cast<int>(std::ceil((probe.center.y + ext - anchor.y) / h));
}

// ---- quadratic form ---------------------------------------------------------

double energy(const CellField& f, double alpha) {
  const KernelTable& t = kernel_table(alpha);
  const double p = 0.5 * (alpha - 2.0);
  const double far = 2.0 * kernels::pair_sum(f.x().data(), f.y().data(), f.w().data(), f.size(), p);
  return std::pow(f.h(), 2.0 + alpha) * (far + near_correction(f, f, t));
}

double bilinear(const CellField& a, const CellField& b, double alpha) {
  require(a.h() == b.h() && a.anchor() == b.anchor(), "cell fields live on different lattices");
  const KernelTable& t = kernel_table(alpha);
  const double p = 0.5 * (alpha - 2.0);
  const double far = kernels::cross_sum(a.x().data(), a.y().data(), a.w().data(), a.size(), b.x().data(),
                                        b.y().data(), b.w().data(), b.size(), p);
  return std::pow(a.h(), 2.0 + alpha) * (far + near_correction(a, b, t));
}

std::vector<double> potential(const CellField& f, double alpha) {
  const KernelTable& t = kernel_table(alpha);
  const double p = 0.5 * (alpha - 2.0);
  std::vector<double> u(f.size());
  kernels::potential(f.x().data(), f.y().data(), f.w().data(), f.size(), p, u.data());
  double corr[5][5];
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n)
      corr[m + 2][n + 2] = (m == 0 && n == 0) ? t(0, 0) : t.near[m + 2][n + 2] - std::pow(double(m * m + n * n), p);
  const double scale = std::pow(f.h(), 2.0 + alpha);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double acc = u[i];
    for (int m = -2; m <= 2; ++m) {
      for (int n = -2; n <= 2; ++n) {
        const long j = f.find(f.ix()[i] + m, f.iy()[i] + n);
        if (j >= 0) acc += f.w()[j] * corr[m + 2][n + 2];
      }
    }
    u[i] = scale * acc;
  }
  return u;
}

// ---- regions ------------------------------------------------------------------

std::vector<SignedRegion> regions_of(const Configuration& config) {
  std::vector<SignedRegion> out;
  for (const auto& comp : config.components) {
    out.push_back({comp.outer, 1.0});
    for (const auto& h : comp.holes) out.push_back({h, -1.0});
  }
  return out;
}

CellField rasterize(const std::vector<SignedRegion>& regions, double h, Point anchor) {
  CellField f(h, anchor);
  for (const auto& r : regions) f.add_region(r.boundary, r.sign);
  f.prune();
  return f;
}

RieszResult riesz(const std::vector<SignedRegion>& regions, Point anchor, double alpha, const QuadratureControls& quad) {
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2) for planar shapes");
  require(!regions.empty(), "no regions to integrate");
  double total_area = 0.0;
  for (const auto& r : regions) {
    const double a = std::visit(
        [](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, FourierCurve>) return area(s);
          else return volume(s);
        },
        r.boundary);
    total_area += r.sign * a;
  }
  require(total_area > 0.0, "region has non-positive area");
  double h = std::sqrt(total_area / kPi) / quad.cells_per_radius;
  RieszResult res;
  res.method = "cell-quadrature";
  for (;;) {
    const CellField fine = rasterize(regions, h, anchor);
    if (static_cast<long long>(fine.size()) > quad.max_cells)
      throw NumericalFailure("cell quadrature exceeded max_cells before reaching the target error");
    const CellField coarse = rasterize(regions, 2.0 * h, anchor);
    res.value = energy(fine, alpha);
    res.error = std::abs(res.value - energy(coarse, alpha));
    if (res.error <= quad.cell_target_rel_error * std::abs(res.value)) return res;
    h /= std::sqrt(2.0);
  }
}

RieszResult riesz(const FourierCurve& curve, double alpha, const QuadratureControls& quad) {
  curve.validate();
  return riesz(std::vector<SignedRegion>{{curve, 1.0}}, curve.center, alpha, quad);
}

RieszResult riesz(const Configuration& config, double alpha, const QuadratureControls& quad) {
  config.validate();
  require(config.dim == 2, "cell quadrature is planar");
  const Point anchor = std::visit([](const auto& s) { return s.center; }, config.components.front().outer);
  return riesz(regions_of(config), anchor, alpha, quad);
}

}  // namespace cdrops::cells
