#include "cdrops/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

#include "cdrops/cells.hpp"
#include "cdrops/energies.hpp"
#include "cdrops/types.hpp"

namespace cdrops::optim {

void OptimShape::validate() const {
  outer.validate();
  if (topology == Topology::Annulus) {
    inner.validate();
    require(inner.center == outer.center + offset, "inner curve center must equal outer center + offset");
    require(nesting_gap(*this) > 0.0, "inner curve must lie strictly inside the outer curve");
  }
}

Configuration OptimShape::configuration() const {
  Configuration c;
  c.dim = 2;
  Component comp;
  comp.outer = outer;
  if (topology == Topology::Annulus) comp.holes.push_back(inner);
  c.components.push_back(comp);
  return c;
}

double nesting_gap(const OptimShape& shape) {
  require(shape.topology == Topology::Annulus, "nesting gap needs annulus topology");
  const CurveSamples s = sample(shape.inner);
  const Point c = shape.outer.center;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.theta.size(); ++j) {
    const double r = shape.inner.base_radius * (1.0 + s.phi[j]);
    const Point p = shape.inner.center + r * Point{std::cos(s.theta[j]), std::sin(s.theta[j]), 0.0};
    const Point v = p - c;
    gap = std::min(gap, shape.outer.radius_at(std::atan2(v.y, v.x)) - norm(v));
  }
  return gap;
}

double inner_mean_radius(const OptimShape& shape) {
  require(shape.topology == Topology::Annulus, "mean inner radius needs annulus topology");
  return shape.inner.base_radius * (1.0 + shape.inner.a[0]);
}

namespace {

// ---- variable layout ----------------------------------------------------------
//
// Outer curve: a_1..a_K, b_1..b_K (a_0 is fixed: together with the area
// rescaling it would only duplicate the overall scale). Annulus topology adds
// the inner a_0..a_K, b_1..b_K and the two offset components.

struct Layout {
  Topology topology;
  int K_out = 0;
  int K_in = 0;
  int n_out() const { return 2 * K_out; }
  int in_begin() const { return n_out(); }
  int n_in() const { return topology == Topology::Annulus ? 2 * K_in + 1 : 0; }
  int off_begin() const { return in_begin() + n_in(); }
  int size() const { return off_begin() + (topology == Topology::Annulus ? 2 : 0); }
};

std::vector<double> pack(const Layout& L, const OptimShape& s) {
  std::vector<double> x(L.size());
  for (int k = 1; k <= L.K_out; ++k) {
    x[k - 1] = s.outer.a[k];
    x[L.K_out + k - 1] = s.outer.b[k];
  }
  if (L.topology == Topology::Annulus) {
    const int b0 = L.in_begin();
    for (int k = 0; k <= L.K_in; ++k) x[b0 + k] = s.inner.a[k];
    for (int k = 1; k <= L.K_in; ++k) x[b0 + L.K_in + k] = s.inner.b[k];
    x[L.off_begin()] = s.offset.x;
    x[L.off_begin() + 1] = s.offset.y;
  }
  return x;
}

// Shape in the reference frame of `ref` with coefficients x.
OptimShape unpack(const Layout& L, const OptimShape& ref, const std::vector<double>& x) {
  OptimShape s = ref;
  for (int k = 1; k <= L.K_out; ++k) {
    s.outer.a[k] = x[k - 1];
    s.outer.b[k] = x[L.K_out + k - 1];
  }
  if (L.topology == Topology::Annulus) {
    const int b0 = L.in_begin();
    for (int k = 0; k <= L.K_in; ++k) s.inner.a[k] = x[b0 + k];
    for (int k = 1; k <= L.K_in; ++k) s.inner.b[k] = x[b0 + L.K_in + k];
    s.offset = {x[L.off_begin()], x[L.off_begin() + 1], 0.0};
    s.inner.center = s.outer.center + s.offset;
  }
  return s;
}

// Diagonal preconditioner: elastica stiffness grows like k^4.
std::vector<double> preconditioner(const Layout& L) {
  std::vector<double> p(L.size(), 1.0);
  auto w = [](int k) { return 1.0 / ((1.0 + k * k) * (1.0 + k * k)) * 4.0; };
  for (int k = 1; k <= L.K_out; ++k) p[k - 1] = p[L.K_out + k - 1] = w(k);
  if (L.topology == Topology::Annulus) {
    const int b0 = L.in_begin();
    for (int k = 0; k <= L.K_in; ++k) p[b0 + k] = w(k);
    for (int k = 1; k <= L.K_in; ++k) p[b0 + L.K_in + k] = w(k);
  }
  return p;
}

// ---- curve functionals and their analytic gradients ---------------------------

struct CurveTerms {
  double A = 0.0, P = 0.0, W = 0.0;
  // Gradients over a_0..a_K then b_1..b_K.
  std::vector<double> dA, dP, dW;
};

CurveTerms curve_terms(const FourierCurve& c, bool grads) {
  const CurveSamples s = sample(c);
  const int n = static_cast<int>(s.phi.size());
  const int K = c.modes();
  const double R = c.base_radius;
  const double hq = kTwoPi / n;
  CurveTerms t;
  std::vector<double> Au, Pu, Pd, Wu, Wd, We;
  if (grads) Au.resize(n), Pu.resize(n), Pd.resize(n), Wu.resize(n), Wd.resize(n), We.resize(n);
  for (int j = 0; j < n; ++j) {
    const double u = 1.0 + s.phi[j];
    if (!(u > 0.0)) throw InvalidInput("curve is not a radial graph: 1 + phi <= 0");
    const double d = s.dphi[j];
    const double e = s.ddphi[j];
    const double D = d * d + u * u;
    const double sq = std::sqrt(D);
    const double N = 2.0 * d * d + u * u - u * e;
    const double D52 = D * D * sq;
    t.A += u * u;
    t.P += sq;
    t.W += N * N / D52;
    if (grads) {
      Au[j] = u;
      Pu[j] = u / sq;
      Pd[j] = d / sq;
      // d(N^2 D^-5/2) = 2 N D^-5/2 dN - 5/2 N^2 D^-7/2 dD
      const double a = 2.0 * N / D52;
      const double b = 2.5 * N * N / (D52 * D);
      Wu[j] = a * (2.0 * u - e) - b * 2.0 * u;
      Wd[j] = a * 4.0 * d - b * 2.0 * d;
      We[j] = -a * u;
    }
  }
  t.A *= 0.5 * R * R * hq;
  t.P *= R * hq;
  t.W *= hq / R;
  if (!grads) return t;
  t.dA.assign(2 * K + 1, 0.0);
  t.dP.assign(2 * K + 1, 0.0);
  t.dW.assign(2 * K + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    t.dA[0] += Au[j];
    t.dP[0] += Pu[j];
    t.dW[0] += Wu[j];
  }
  for (int k = 1; k <= K; ++k) {
    double sa = 0, sp_a = 0, sw_a = 0, sb = 0, sp_b = 0, sw_b = 0;
    for (int j = 0; j < n; ++j) {
      // Exact table lookup keeps the basis bit-identical to sample().
      const double th = s.theta[j] * k;
      const double ck = std::cos(th), sk = std::sin(th);
      // a_k: du = cos, dd = -k sin, de = -k^2 cos ; b_k: du = sin, dd = k cos, de = -k^2 sin
      sa += Au[j] * ck;
      sp_a += Pu[j] * ck - Pd[j] * k * sk;
      sw_a += Wu[j] * ck - Wd[j] * k * sk - We[j] * k * k * ck;
      sb += Au[j] * sk;
      sp_b += Pu[j] * sk + Pd[j] * k * ck;
      sw_b += Wu[j] * sk + Wd[j] * k * ck - We[j] * k * k * sk;
    }
    t.dA[k] = sa;
    t.dP[k] = sp_a;
    t.dW[k] = sw_a;
    t.dA[K + k] = sb;
    t.dP[K + k] = sp_b;
    t.dW[K + k] = sw_b;
  }
  for (auto& v : t.dA) v *= R * R * hq;
  for (auto& v : t.dP) v *= R * hq;
  for (auto& v : t.dW) v *= hq / R;
  return t;
}

// ---- Riesz term on a fixed lattice ---------------------------------------------

// Cells cut by boundary b: the only ones whose coverage moves (to first
// order) when b moves slightly.
struct Band {
  std::vector<int> i, j;
  std::vector<Point> q;
};

Band band_of(const FourierCurve& b, double h) {
  const double r_lo = inscribed_radius(b) - 3.0 * h;
  const double r_hi = bounding_radius(b) + 3.0 * h;
  int i0, i1, j0, j1;
  cells::cell_range(b, h, Point{}, i0, i1, j0, j1);
  Band ring;
  for (int j = j0 - 1; j <= j1 + 1; ++j) {
    for (int i = i0 - 1; i <= i1 + 1; ++i) {
      const Point q{h * i, h * j, 0.0};
      const double r = norm(q - b.center);
      if (r < r_lo || r > r_hi) continue;
      ring.i.push_back(i);
      ring.j.push_back(j);
      ring.q.push_back(q);
    }
  }
  const std::vector<double> cov = cells::coverage(b, ring.q, h);
  Band out;
  for (std::size_t c = 0; c < cov.size(); ++c) {
    if (cov[c] > 0.0 && cov[c] < 1.0) {
      out.i.push_back(ring.i[c]);
      out.j.push_back(ring.j[c]);
      out.q.push_back(ring.q[c]);
    }
  }
  return out;
}

cells::CellField field_of(const OptimShape& s, double h) {
  cells::CellField f(h, Point{});
  f.add_region(s.outer, 1.0);
  if (s.topology == Topology::Annulus) f.add_region(s.inner, -1.0);
  return f;
}

double riesz_value(const OptimShape& s, double h, double alpha) {
  cells::CellField f = field_of(s, h);
  f.prune();
  return cells::energy(f, alpha);
}

// dV/dx for every variable by central differences of the cell energy. With
// u = K w cached, V(w + dw) = V + 2 dw.u + dw^T K dw; the quadratic parts of
// the two sides cancel to O(delta^3) and are dropped.
std::vector<double> riesz_gradient(const Layout& L, const OptimShape& ref, const std::vector<double>& x, double h,
                                   double alpha, double delta, double* value) {
  const OptimShape s = unpack(L, ref, x);
  const Band band_out = band_of(s.outer, h);
  Band band_in;
  if (L.topology == Topology::Annulus) band_in = band_of(s.inner, h);

  cells::CellField f = field_of(s, h);
  f.prune();
  for (std::size_t c = 0; c < band_out.q.size(); ++c) f.add(band_out.i[c], band_out.j[c], 0.0);
  for (std::size_t c = 0; c < band_in.q.size(); ++c) f.add(band_in.i[c], band_in.j[c], 0.0);
  const std::vector<double> u = cells::potential(f, alpha);
  double v = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) v += f.w()[i] * u[i];
  if (value) *value = v;

  auto band_potential = [&](const Band& b) {
    std::vector<double> ub(b.q.size());
    for (std::size_t c = 0; c < b.q.size(); ++c) ub[c] = u[f.find(b.i[c], b.j[c])];
    return ub;
  };
  const std::vector<double> u_out = band_potential(band_out);
  const std::vector<double> u_in = band_potential(band_in);

  std::vector<double> g(L.size(), 0.0);
  for (int var = 0; var < L.size(); ++var) {
    const bool outer_var = var < L.n_out();
    const Band& band = outer_var ? band_out : band_in;
    const std::vector<double>& ub = outer_var ? u_out : u_in;
    std::vector<double> xs = x;
    xs[var] = x[var] + delta;
    const OptimShape mp = unpack(L, ref, xs);
    xs[var] = x[var] - delta;
    const OptimShape mm = unpack(L, ref, xs);
    const auto cp = cells::coverage(outer_var ? mp.outer : mp.inner, band.q, h);
    const auto cm = cells::coverage(outer_var ? mm.outer : mm.inner, band.q, h);
    double lin = 0.0;
    for (std::size_t c = 0; c < band.q.size(); ++c) lin += (cp[c] - cm[c]) * ub[c];
    g[var] = (outer_var ? 2.0 : -2.0) * lin / (2.0 * delta);
  }
  return g;
}

// Largest Euclidean step over the (a_k, b_k) pairs, the hole's a_0 and the offset.
double largest_mode_step(const Layout& L, const std::vector<double>& d) {
  double m = 0.0;
  for (int k = 0; k < L.K_out; ++k) m = std::max(m, std::hypot(d[k], d[L.K_out + k]));
  if (L.topology == Topology::Annulus) {
    const int b0 = L.in_begin();
    m = std::max(m, std::abs(d[b0]));
    for (int k = 1; k <= L.K_in; ++k) m = std::max(m, std::hypot(d[b0 + k], d[b0 + L.K_in + k]));
    m = std::max(m, std::hypot(d[L.off_begin()], d[L.off_begin() + 1]));
  }
  return m;
}

// ---- reduced energy -------------------------------------------------------------

struct Model {
  Layout L;
  OptimShape ref;  // reference frame: curves keep the initial base radii
  EnergyParams params;
  OptimBudget budget;
  double h = 0.0;  // Riesz lattice spacing, reference frame

  struct Value {
    double E = 0.0;
    double scale = 1.0;
    std::vector<double> grad;
  };

  bool admissible(const OptimShape& s) const {
    try {
      s.outer.validate();
      if (L.topology == Topology::Annulus) {
        s.inner.validate();
        if (nesting_gap(s) < budget.min_gap * s.outer.base_radius) return false;
      }
    } catch (const InvalidInput&) {
      return false;
    }
    return true;
  }

  // Without gradients, stop before the Riesz term once the other terms alone
  // exceed `cutoff` (V >= 0); E is then that partial sum.
  Value eval(const std::vector<double>& x, bool grads,
             double cutoff = std::numeric_limits<double>::infinity()) const {
    const OptimShape s = unpack(L, ref, x);
    const CurveTerms to = curve_terms(s.outer, grads);
    CurveTerms ti;
    if (L.topology == Topology::Annulus) ti = curve_terms(s.inner, grads);
    const double A1 = to.A - ti.A;
    const double P1 = to.P + ti.P;
    const double W1 = to.W + ti.W;
    require(A1 > 0.0, "shape has non-positive area");
    const double sc = std::sqrt(kPi / A1);
    const double lam = params.lambda, Q = params.Q, al = params.alpha;

    double V1 = 0.0;
    std::vector<double> dV;
    if (!grads && Q > 0.0 && lam * sc * P1 + W1 / sc > cutoff) return {lam * sc * P1 + W1 / sc, sc, {}};
    if (Q > 0.0) {
      if (grads)
        dV = riesz_gradient(L, ref, x, h, al, budget.fd_step, &V1);
      else
        V1 = riesz_value(s, h, al);
    }
    Value out;
    out.scale = sc;
    out.E = lam * sc * P1 + W1 / sc + (Q > 0.0 ? Q * std::pow(sc, 2.0 + al) * V1 : 0.0);
    if (!grads) return out;

    std::vector<double> dA(L.size(), 0.0), dP(L.size(), 0.0), dW(L.size(), 0.0);
    for (int k = 1; k <= L.K_out; ++k) {
      for (int ab = 0; ab < 2; ++ab) {
        const int src = ab == 0 ? k : L.K_out + k;
        const int dst = ab == 0 ? k - 1 : L.K_out + k - 1;
        dA[dst] = to.dA[src];
        dP[dst] = to.dP[src];
        dW[dst] = to.dW[src];
      }
    }
    if (L.topology == Topology::Annulus) {
      const int b0 = L.in_begin();
      for (int i = 0; i < L.n_in(); ++i) {
        dA[b0 + i] = -ti.dA[i];
        dP[b0 + i] = ti.dP[i];
        dW[b0 + i] = ti.dW[i];
      }
    }
    out.grad.assign(L.size(), 0.0);
    for (int i = 0; i < L.size(); ++i) {
      const double ds = -0.5 * sc / A1 * dA[i];
      double g = lam * (sc * dP[i] + P1 * ds) + dW[i] / sc - W1 * ds / (sc * sc);
      if (Q > 0.0) g += Q * (std::pow(sc, 2.0 + al) * dV[i] + (2.0 + al) * std::pow(sc, 1.0 + al) * V1 * ds);
      out.grad[i] = g;
    }
    return out;
  }

  // Physical shape: rescale the reference-frame shape by `sc`.
  OptimShape physical(const std::vector<double>& x, double sc) const {
    OptimShape s = unpack(L, ref, x);
    s.outer.base_radius *= sc;
    s.outer.center = sc * s.outer.center;
    if (L.topology == Topology::Annulus) {
      s.inner.base_radius *= sc;
      s.offset = sc * s.offset;
      s.inner.center = s.outer.center + s.offset;
    }
    return s;
  }
};

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Layout layout_of(const OptimShape& s) {
  Layout L;
  L.topology = s.topology;
  L.K_out = s.outer.modes();
  L.K_in = s.topology == Topology::Annulus ? s.inner.modes() : 0;
  return L;
}

}  // namespace

OptimResult minimize(const OptimShape& init, const EnergyParams& params, const OptimBudget& budget) {
  params.validate();
  require(params.dim == 2, "the optimizer works with planar shapes");
  require(params.alpha > 0.0 && params.alpha < 2.0, "alpha must lie in (0, 2)");
  require(budget.max_iterations >= 0 && budget.grad_tol > 0.0 && budget.initial_step > 0.0 &&
              budget.max_step >= budget.initial_step && budget.max_halvings >= 1 && budget.fd_step > 0.0 &&
              budget.min_gap >= 0.0 && budget.cells_across_gap >= 1,
          "invalid optimizer budget");
  init.validate();

  Model model;
  model.L = layout_of(init);
  model.params = params;
  model.budget = budget;
  // Reference frame: the initial shape with its outer center moved to the origin.
  model.ref = init;
  model.ref.outer.center = Point{};
  if (init.topology == Topology::Annulus) model.ref.inner.center = init.offset;
  double h = model.ref.outer.base_radius / params.quad.cells_per_radius;
  if (init.topology == Topology::Annulus) {
    h = std::min(h, nesting_gap(model.ref) / budget.cells_across_gap);
  }
  model.h = h;

  std::vector<double> x = pack(model.L, model.ref);
  require(model.admissible(unpack(model.L, model.ref, x)), "initial shape violates graph validity or nesting");
  std::vector<double> pre = preconditioner(model.L);
  if (budget.round_boundaries) {
    // Zero preconditioner entries freeze the modes: every direction is P g based.
    for (int k = 0; k < model.L.n_out(); ++k) pre[k] = 0.0;
    for (int k = 1; k < model.L.n_in(); ++k) pre[model.L.in_begin() + k] = 0.0;
  }
  // Gradient norm over the free variables.
  auto gnorm = [&](const std::vector<double>& g) {
    double v = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (pre[i] != 0.0) v += g[i] * g[i];
    return std::sqrt(v);
  };

  OptimResult res;
  res.cell_spacing = h;
  Model::Value cur = model.eval(x, true);
  double t = budget.initial_step;
  auto record = [&](int it, double step) {
    const OptimShape s = model.physical(x, cur.scale);
    res.trajectory.push_back({it, cur.E, gnorm(cur.grad), step, norm(s.offset)});
  };
  record(0, 0.0);

  int it = 0;
  res.stop_reason = "budget";
  // Relative rounding level of the energy sums.
  constexpr double kNoise = 1e-14;
  const bool quasi_newton = budget.lbfgs_memory > 0;
  std::deque<std::vector<double>> hist_s, hist_y;
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * b[i];
    return v;
  };
  // Two-loop recursion with the diagonal preconditioner as initial inverse Hessian.
  auto direction = [&](const std::vector<double>& g) {
    std::vector<double> q = g;
    const std::size_t m = hist_s.size();
    std::vector<double> al(m);
    for (std::size_t k = m; k-- > 0;) {
      al[k] = dot(hist_s[k], q) / dot(hist_y[k], hist_s[k]);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] -= al[k] * hist_y[k][i];
    }
    double gamma = 1.0;
    if (m > 0) {
      const auto& yl = hist_y.back();
      double ypy = 0.0;
      for (std::size_t i = 0; i < yl.size(); ++i) ypy += yl[i] * pre[i] * yl[i];
      gamma = dot(hist_s.back(), yl) / ypy;
    }
    for (std::size_t i = 0; i < q.size(); ++i) q[i] *= gamma * pre[i];
    for (std::size_t k = 0; k < m; ++k) {
      const double be = dot(hist_y[k], q) / dot(hist_y[k], hist_s[k]);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += (al[k] - be) * hist_s[k][i];
    }
    for (double& v : q) v = -v;
    return q;
  };

  for (;;) {
    if (gnorm(cur.grad) <= budget.grad_tol) {
      res.stop_reason = "gradient";
      break;
    }
    if (it >= budget.max_iterations) break;
    std::vector<double> d = quasi_newton ? direction(cur.grad) : std::vector<double>(x.size());
    if (!quasi_newton)
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = -pre[i] * cur.grad[i];
    double slope = dot(cur.grad, d);
    if (quasi_newton && !(slope < 0.0)) {
      hist_s.clear(), hist_y.clear();
      d = direction(cur.grad);
      slope = dot(cur.grad, d);
    }
    if (quasi_newton) t = budget.initial_step;
    // Trust cap: no mode (a_k, b_k pair, or the offset) moves by more than 0.1
    // in one trial. Pairs keep the cap, and so the run, rotation equivariant.
    const double dmax = largest_mode_step(model.L, d);
    if (dmax > 0.0) t = std::min(t, 0.1 / dmax);
    bool accepted = false;
    std::vector<double> xn(x.size());
    Model::Value next;
    bool have_next = false;
    for (int hv = 0; hv < budget.max_halvings; ++hv, t *= 0.5) {
      for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + t * d[i];
      if (!model.admissible(unpack(model.L, model.ref, xn))) {
        ++res.rejected_steps;
        continue;
      }
      const double En = model.eval(xn, false, cur.E + kNoise * std::abs(cur.E)).E;
      if (En <= cur.E + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      // Near the minimum the decrease drops below the rounding of E; fall back
      // to the approximate Wolfe test, which reads the slope instead.
      if (En <= cur.E + kNoise * std::abs(cur.E)) {
        next = model.eval(xn, true);
        const double sn = dot(next.grad, d);
        if (sn >= 0.9 * slope && sn <= -(1.0 - 2e-4) * slope && gnorm(next.grad) < gnorm(cur.grad)) {
          accepted = have_next = true;
          break;
        }
      }
    }
    if (!accepted) {
      // A stale curvature model can point nowhere useful; retry once from scratch.
      if (quasi_newton && !hist_s.empty()) {
        hist_s.clear(), hist_y.clear();
        continue;
      }
      res.stop_reason = "stalled";
      break;
    }
    if (!have_next) next = model.eval(xn, true);
    if (quasi_newton) {
      std::vector<double> sv(x.size()), yv(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) sv[i] = xn[i] - x[i], yv[i] = next.grad[i] - cur.grad[i];
      if (dot(sv, yv) > 1e-12 * l2(sv) * l2(yv)) {
        hist_s.push_back(sv), hist_y.push_back(yv);
        if (static_cast<int>(hist_s.size()) > budget.lbfgs_memory) hist_s.pop_front(), hist_y.pop_front();
      }
    }
    x = xn;
    cur = std::move(next);
    ++it;
    record(it, t);
    if (!quasi_newton) t = std::min(2.0 * t, budget.max_step);
  }

  res.converged = res.stop_reason == "gradient";
  res.final_state.shape = model.physical(x, cur.scale);
  res.final_state.shape.outer.center = init.outer.center;
  if (init.topology == Topology::Annulus)
    res.final_state.shape.inner.center = init.outer.center + res.final_state.shape.offset;
  res.final_state.params = params;
  res.final_state.step = t;
  res.final_state.energy = cur.E;
  res.final_state.iteration = it;
  res.final_state.grad_norm = gnorm(cur.grad);

  const OptimShape& fs = res.final_state.shape;
  if (fs.topology == Topology::Ball) {
    res.classification_hint = "ball";
    res.distance_to_primitive = asymmetry(fs.outer).value;
  } else {
    res.classification_hint = "centered annulus";
    const double R = std::sqrt(area(fs.outer) / kPi);
    const double r = std::sqrt(area(fs.inner) / kPi);
    res.distance_to_primitive = symmetric_difference(fs.outer, Ball{2, fs.outer.center, R}) +
                                symmetric_difference(fs.inner, Ball{2, fs.outer.center, r});
  }
  return res;
}

OptimResult minimize_ball_topology(const FourierCurve& init, const EnergyParams& params, const OptimBudget& budget) {
  OptimShape s;
  s.topology = Topology::Ball;
  s.outer = init;
  return minimize(s, params, budget);
}

OptimResult minimize_annulus_topology(const FourierCurve& outer, const FourierCurve& inner, Point offset,
                                      const EnergyParams& params, const OptimBudget& budget) {
  OptimShape s;
  s.topology = Topology::Annulus;
  s.outer = outer;
  s.inner = inner;
  s.offset = offset;
  s.inner.center = outer.center + offset;
  return minimize(s, params, budget);
}

namespace {

// Analytic (P, W) gradients over every coefficient of every curve.
void shape_gradients(const OptimShape& s, std::vector<double>& ga) {
  ga.clear();
  const CurveTerms to = curve_terms(s.outer, true);
  for (std::size_t i = 0; i < to.dP.size(); ++i) ga.push_back(to.dP[i]);
  for (std::size_t i = 0; i < to.dW.size(); ++i) ga.push_back(to.dW[i]);
  if (s.topology == Topology::Annulus) {
    const CurveTerms ti = curve_terms(s.inner, true);
    for (std::size_t i = 0; i < ti.dP.size(); ++i) ga.push_back(ti.dP[i]);
    for (std::size_t i = 0; i < ti.dW.size(); ++i) ga.push_back(ti.dW[i]);
  }
}

}  // namespace

double gradient_check(const OptimShape& shape, double fd_step) {
  require(fd_step > 0.0, "finite-difference step must be positive");
  shape.validate();
  std::vector<double> analytic;
  shape_gradients(shape, analytic);

  std::vector<double> numeric;
  auto fd_curve = [&](const FourierCurve& c) {
    const int K = c.modes();
    std::vector<double> gp(2 * K + 1), gw(2 * K + 1);
    for (int idx = 0; idx <= 2 * K; ++idx) {
      double val[2][2];
      for (int side = 0; side < 2; ++side) {
        FourierCurve m = c;
        const double dlt = side == 0 ? fd_step : -fd_step;
        if (idx <= K)
          m.a[idx] += dlt;
        else
          m.b[idx - K] += dlt;
        val[side][0] = perimeter(m);
        val[side][1] = elastica_energy(m);
      }
      gp[idx] = (val[0][0] - val[1][0]) / (2.0 * fd_step);
      gw[idx] = (val[0][1] - val[1][1]) / (2.0 * fd_step);
    }
    numeric.insert(numeric.end(), gp.begin(), gp.end());
    numeric.insert(numeric.end(), gw.begin(), gw.end());
  };
  fd_curve(shape.outer);
  if (shape.topology == Topology::Annulus) fd_curve(shape.inner);

  double scale = 1e-3;
  for (double v : numeric) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, std::abs(analytic[i] - numeric[i]));
  return worst / scale;
}

double shape_gradient_max(const OptimShape& shape) {
  shape.validate();
  double worst = 0.0;
  auto scan = [&](const FourierCurve& c) {
    const CurveTerms t = curve_terms(c, true);
    for (std::size_t i = 1; i < t.dP.size(); ++i) worst = std::max({worst, std::abs(t.dP[i]), std::abs(t.dW[i])});
  };
  scan(shape.outer);
  if (shape.topology == Topology::Annulus) scan(shape.inner);
  return worst;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory) {
  std::string out = "iteration,energy,grad_norm,step,offset\n";
  char buf[160];
  for (const auto& p : trajectory) {
    std::snprintf(buf, sizeof buf, "%d,%.15g,%.15g,%.15g,%.15g\n", p.iteration, p.energy, p.grad_norm, p.step,
                  p.offset);
    out += buf;
  }
  return out;
}

}  // namespace cdrops::optim
