#include "cdrops/energies.hpp"

#include <cmath>

#include "cdrops/cells.hpp"

namespace cdrops {

namespace {

bool is_round(const FourierCurve& c) {
  for (int k = 1; k <= c.modes(); ++k)
    if (c.a[k] != 0.0 || c.b[k] != 0.0) return false;
  return true;
}

double boundary_bending(const Boundary& b, int dim) {
  if (const auto* curve = std::get_if<FourierCurve>(&b)) return elastica_energy(*curve);
  const Ball& ball = std::get<Ball>(b);
  return dim == 3 ? 4.0 * kPi : kTwoPi / ball.radius;
}

// Single component bounded by balls with at most one ball hole.
bool as_annulus(const Configuration& c, Ball& outer, const Ball*& hole) {
  if (c.components.size() != 1) return false;
  const Component& comp = c.components.front();
  const auto* o = std::get_if<Ball>(&comp.outer);
  if (!o || comp.holes.size() > 1) return false;
  outer = *o;
  hole = nullptr;
  if (comp.holes.size() == 1) {
    hole = std::get_if<Ball>(&comp.holes.front());
    if (!hole) return false;
  }
  return true;
}

RieszResult monte_carlo_shape(const Shape& shape, const EnergyParams& p) {
  const int dim = p.dim;
  Point center{};
  double radius = 0.0;
  std::function<bool(const Point&)> inside;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) {
          center = s.center;
          radius = bounding_radius(s);
          inside = [&s](const Point& q) { return contains(s, q); };
        } else if constexpr (std::is_same_v<T, Ball>) {
          center = s.center;
          radius = s.radius;
          inside = [&s](const Point& q) { return contains(s, q); };
        } else if constexpr (std::is_same_v<T, AnnulusSpec>) {
          radius = s.r_out;
          inside = [&s](const Point& q) { return contains(s, q); };
        } else {
          // bounding ball of all outer boundaries
          double n = 0.0;
          for (const auto& comp : s.components) {
            center = center + std::visit([](const auto& b) { return b.center; }, comp.outer);
            n += 1.0;
          }
          center = (1.0 / n) * center;
          for (const auto& comp : s.components) {
            const double r = std::visit(
                [](const auto& b) -> double {
                  using B = std::decay_t<decltype(b)>;
                  if constexpr (std::is_same_v<B, FourierCurve>) return bounding_radius(b);
                  else return b.radius;
                },
                comp.outer);
            const Point c = std::visit([](const auto& b) { return b.center; }, comp.outer);
            radius = std::max(radius, norm(c - center) + r);
          }
          inside = [&s](const Point& q) {
            auto in = [&q](const Boundary& b) { return std::visit([&q](const auto& x) { return contains(x, q); }, b); };
            for (const auto& comp : s.components) {
              if (!in(comp.outer)) continue;
              bool in_hole = false;
              for (const auto& h : comp.holes) in_hole = in_hole || in(h);
              if (!in_hole) return true;
            }
            return false;
          };
        }
      },
      shape);
  return riesz::monte_carlo(inside, dim, volume(shape), center, radius, p.alpha, p.quad.mc_samples, p.quad.seed);
}

RieszResult radial_shape(const Shape& shape, const EnergyParams& p, bool kernel) {
  double r_out = 0.0;
  double r_in = 0.0;
  Point offset{};
  if (const auto* b = std::get_if<Ball>(&shape)) {
    r_out = b->radius;
  } else if (const auto* a = std::get_if<AnnulusSpec>(&shape)) {
    r_out = a->r_out;
    r_in = a->r_in;
    offset = a->offset;
  } else if (const auto* c = std::get_if<FourierCurve>(&shape)) {
    if (!is_round(*c)) throw InvalidInput("radial quadrature needs a round curve; use cell or monte-carlo");
    r_out = c->base_radius * (1.0 + c->a[0]);
  } else {
    const auto& cfg = std::get<Configuration>(shape);
    Ball outer;
    const Ball* hole = nullptr;
    if (!as_annulus(cfg, outer, hole))
      throw InvalidInput("radial quadrature needs a ball or a ball with one ball hole");
    r_out = outer.radius;
    if (hole) {
      r_in = hole->radius;
      offset = hole->center - outer.center;
    }
  }
  if (kernel) {
    if (norm(offset) > 0.0) throw InvalidInput("the kernel route handles centered annuli only");
    return riesz::annulus_kernel(p.dim, p.alpha, r_out, r_in, p.quad);
  }
  return riesz::annulus_covariogram(p.dim, p.alpha, r_out, r_in, offset, p.quad);
}

void validate_shape(const Shape& shape) {
  std::visit([](const auto& s) { s.validate(); }, shape);
}

}  // namespace

RieszMethod parse_riesz_method(const std::string& name) {
  if (name == "auto") return RieszMethod::Auto;
  if (name == "radial" || name == "radial-quadrature") return RieszMethod::Radial;
  if (name == "radial-kernel") return RieszMethod::RadialKernel;
  if (name == "cell" || name == "cell-quadrature") return RieszMethod::Cell;
  if (name == "monte-carlo" || name == "mc") return RieszMethod::MonteCarlo;
  throw InvalidInput("unknown riesz method '" + name + "'");
}

double elastica_energy(const FourierCurve& curve) {
  const CurveSamples s = sample(curve);
  double sum = 0.0;
  for (std::size_t j = 0; j < s.phi.size(); ++j) {
    const double r = 1.0 + s.phi[j];
    if (!(r > 0.0)) throw InvalidInput("curve is not a radial graph: 1 + phi <= 0");
    const double d = s.dphi[j];
    const double num = 2.0 * d * d + r * r - r * s.ddphi[j];
    const double den = d * d + r * r;
    sum += num * num / (den * den * std::sqrt(den));
  }
  return sum * kTwoPi / curve.n_samples / curve.base_radius;
}

double willmore_closed(const Shape& shape) {
  require(shape_dim(shape) == 3, "closed-form Willmore energies are 3D only; use elastica in 2D");
  if (std::holds_alternative<Ball>(shape)) return 4.0 * kPi;
  if (std::holds_alternative<AnnulusSpec>(shape)) return 8.0 * kPi;
  if (const auto* c = std::get_if<Configuration>(&shape)) {
    double w = 0.0;
    for (const auto& comp : c->components) w += 4.0 * kPi * (1.0 + comp.holes.size());
    return w;
  }
  throw InvalidInput("closed-form Willmore energy needs a ball, shell or configuration of balls");
}

double bending_energy(const Shape& shape) {
  const int dim = shape_dim(shape);
  if (dim == 3) return willmore_closed(shape);
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) return elastica_energy(s);
        else if constexpr (std::is_same_v<T, Ball>) return kTwoPi / s.radius;
        else if constexpr (std::is_same_v<T, AnnulusSpec>) return kTwoPi * (1.0 / s.r_in + 1.0 / s.r_out);
        else {
          double w = 0.0;
          for (const auto& comp : s.components) {
            w += boundary_bending(comp.outer, 2);
            for (const auto& h : comp.holes) w += boundary_bending(h, 2);
          }
          return w;
        }
      },
      shape);
}

RieszResult riesz_energy(const Shape& shape, const EnergyParams& params, RieszMethod method) {
  params.validate();
  validate_shape(shape);
  require(shape_dim(shape) == params.dim, "shape dimension does not match params.dim");
  const int dim = params.dim;
  if (method == RieszMethod::Auto) {
    method = RieszMethod::Radial;
    if (const auto* c = std::get_if<FourierCurve>(&shape)) {
      if (!is_round(*c)) method = RieszMethod::Cell;
    } else if (const auto* cfg = std::get_if<Configuration>(&shape)) {
      Ball outer;
      const Ball* hole = nullptr;
      if (!as_annulus(*cfg, outer, hole)) method = dim == 2 ? RieszMethod::Cell : RieszMethod::MonteCarlo;
    }
  }
  switch (method) {
    case RieszMethod::Radial: return radial_shape(shape, params, false);
    case RieszMethod::RadialKernel: return radial_shape(shape, params, true);
    case RieszMethod::MonteCarlo: return monte_carlo_shape(shape, params);
    case RieszMethod::Cell: {
      require(dim == 2, "cell quadrature is planar");
      return std::visit(
          [&](const auto& s) -> RieszResult {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FourierCurve>) return cells::riesz(s, params.alpha, params.quad);
            else if constexpr (std::is_same_v<T, Ball>)
              return cells::riesz(std::vector<cells::SignedRegion>{{s, 1.0}}, s.center, params.alpha, params.quad);
            else if constexpr (std::is_same_v<T, AnnulusSpec>)
              return cells::riesz(Configuration::from_annulus(s), params.alpha, params.quad);
            else return cells::riesz(s, params.alpha, params.quad);
          },
          shape);
    }
    default: break;
  }
  throw InvalidInput("unsupported riesz method");
}

EnergyReport total_energy(const Shape& shape, const EnergyParams& params, RieszMethod method) {
  const RieszResult v = riesz_energy(shape, params, method);
  EnergyReport r;
  r.lambda = params.lambda;
  r.Q = params.Q;
  r.perimeter_raw = perimeter(shape);
  r.riesz_raw = v.value;
  r.perimeter_term = params.lambda * r.perimeter_raw;
  r.bending_term = bending_energy(shape);
  r.riesz_term = params.Q * r.riesz_raw;
  r.total = r.perimeter_term + r.bending_term + r.riesz_term;
  r.riesz_error_estimate = v.error;
  r.method = v.method;
  return r;
}

}  // namespace cdrops
