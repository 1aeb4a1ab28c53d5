#include "cdrops/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cdrops/energies.hpp"
#include "cdrops/types.hpp"

namespace cdrops::stability {

namespace {

// sum over k >= 1 of w(k) (a_k^2 + b_k^2)
template <class W>
double mode_sum(const FourierCurve& c, W&& w) {
  double s = 0.0;
  for (int k = 1; k <= c.modes(); ++k) s += w(static_cast<double>(k)) * (c.a[k] * c.a[k] + c.b[k] * c.b[k]);
  return s;
}

// Trapezoid sums of (1 + phi)^3 - 1 and 3 (1 + phi)^2 against cos and sin;
// exact for these trigonometric polynomials once n >= 4K + 4.
struct Moments {
  double cx = 0.0, cy = 0.0;                 // barycenter residual
  double j_cc = 0.0, j_cs = 0.0, j_ss = 0.0;  // 3 int (1+phi)^2 {cos^2, cos sin, sin^2}
  double j_c = 0.0, j_s = 0.0;                // 3 int (1+phi)^2 {cos, sin}
};

Moments moments(const FourierCurve& curve) {
  const CurveSamples s = sample(curve);
  const std::size_t n = s.theta.size();
  const double h = kTwoPi / static_cast<double>(n);
  Moments m;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = 1.0 + s.phi[j];
    const double c = std::cos(s.theta[j]);
    const double sn = std::sin(s.theta[j]);
    const double cube = u * u * u - 1.0;
    const double sq3 = 3.0 * u * u;
    m.cx += cube * c;
    m.cy += cube * sn;
    m.j_cc += sq3 * c * c;
    m.j_cs += sq3 * c * sn;
    m.j_ss += sq3 * sn * sn;
    m.j_c += sq3 * c;
    m.j_s += sq3 * sn;
  }
  m.cx *= h, m.cy *= h, m.j_cc *= h, m.j_cs *= h, m.j_ss *= h, m.j_c *= h, m.j_s *= h;
  return m;
}

// Solve the 3x3 system A x = r by Gaussian elimination with partial pivoting.
bool solve3(double A[3][3], double r[3], double x[3]) {
  int p[3] = {0, 1, 2};
  for (int c = 0; c < 3; ++c) {
    int best = c;
    for (int i = c + 1; i < 3; ++i)
      if (std::abs(A[p[i]][c]) > std::abs(A[p[best]][c])) best = i;
    std::swap(p[c], p[best]);
    if (A[p[c]][c] == 0.0) return false;
    for (int i = c + 1; i < 3; ++i) {
      const double f = A[p[i]][c] / A[p[c]][c];
      for (int k = c; k < 3; ++k) A[p[i]][k] -= f * A[p[c]][k];
      r[p[i]] -= f * r[p[c]];
    }
  }
  for (int c = 2; c >= 0; --c) {
    double v = r[p[c]];
    for (int k = c + 1; k < 3; ++k) v -= A[p[c]][k] * x[k];
    x[c] = v / A[p[c]][c];
  }
  return true;
}

}  // namespace

double w22_norm(const FourierCurve& c) {
  const double s = kTwoPi * c.a[0] * c.a[0] + kPi * mode_sum(c, [](double k) { return 1.0 + k * k + k * k * k * k; });
  return std::sqrt(s);
}

double volume_residual(const FourierCurve& c) {
  const double l2 = kTwoPi * c.a[0] * c.a[0] + kPi * mode_sum(c, [](double) { return 1.0; });
  return kTwoPi * c.a[0] + 0.5 * l2;
}

Point barycenter_residual(const FourierCurve& curve) {
  const Moments m = moments(curve);
  return {m.cx, m.cy, 0.0};
}

Perturbation describe(const FourierCurve& curve) {
  Perturbation p;
  p.curve = curve;
  p.norm_w22 = w22_norm(curve);
  p.volume_residual = volume_residual(curve);
  p.barycenter_residual = norm(barycenter_residual(curve));
  return p;
}

Perturbation project_constraints(const FourierCurve& input, double max_norm) {
  input.validate();
  const double n0 = w22_norm(input);
  require(n0 <= max_norm * (1.0 + 1e-9), "projection needs a W^{2,2} norm of at most " + std::to_string(max_norm));
  FourierCurve c = input;
  int it = 0;
  for (;; ++it) {
    const Moments m = moments(c);
    const double f[3] = {volume_residual(c), m.cx, m.cy};
    if (std::abs(f[0]) <= 1e-12 && std::abs(f[1]) <= 1e-12 && std::abs(f[2]) <= 1e-12) break;
    if (it >= 50) throw NumericalFailure("constraint projection did not converge in 50 Newton steps");
    // Unknowns (a_0, a_1, b_1).
    double J[3][3] = {{kTwoPi * (1.0 + c.a[0]), kPi * c.a[1], kPi * c.b[1]},
                      {m.j_c, m.j_cc, m.j_cs},
                      {m.j_s, m.j_cs, m.j_ss}};
    double r[3] = {f[0], f[1], f[2]};
    double dx[3];
    if (!solve3(J, r, dx)) throw NumericalFailure("constraint projection: singular Jacobian");
    c.a[0] -= dx[0];
    c.a[1] -= dx[1];
    c.b[1] -= dx[2];
  }
  Perturbation p = describe(c);
  p.newton_iterations = it;
  return p;
}

double taylor_elastica_deficit(const FourierCurve& c) {
  const double modes = kPi * mode_sum(c, [](double k) { return k * k * k * k - 2.5 * k * k + 1.0; });
  return (modes + kTwoPi * c.a[0] * c.a[0] - kTwoPi * c.a[0]) / c.base_radius;
}

double constrained_quadratic_form(const FourierCurve& c) {
  return kPi * mode_sum(c, [](double k) { return k * k * k * k - 2.5 * k * k + 1.5; }) + 3.0 * kPi * c.a[0] * c.a[0];
}

double taylor_perimeter_deficit(const FourierCurve& c) {
  return c.base_radius * (kTwoPi * c.a[0] + 0.5 * kPi * mode_sum(c, [](double k) { return k * k; }));
}

std::vector<std::pair<int, double>> quadratic_form_spectrum(int K) {
  require(K >= 1, "spectrum needs K >= 1");
  std::vector<std::pair<int, double>> out;
  for (int k = 0; k <= K; ++k) {
    const double kk = static_cast<double>(k) * k;
    out.emplace_back(k, kk * kk - 2.5 * kk + 1.5);
  }
  return out;
}

double richardson(double at_t, double at_half_t, int order) {
  const double f = std::ldexp(1.0, order);
  return (f * at_half_t - at_t) / (f - 1.0);
}

FourierCurve pure_mode(int k, double t, int n_samples) {
  require(k >= 2, "pure modes start at k = 2");
  FourierCurve c = FourierCurve::circle(1.0, {}, std::max(2, k), n_samples);
  c.a[k] = t;
  // Single modes project in a couple of Newton steps, so the norm cap is relaxed.
  return project_constraints(c, 1.0).curve;
}

void DeficitConfig::validate() const {
  require(mode_min >= 2 && mode_max >= mode_min, "modes must satisfy 2 <= mode_min <= mode_max");
  require(!norms.empty(), "at least one norm is required");
  for (double n : norms) require(n > 0.0 && n <= 0.1, "norms must lie in (0, 0.1]");
  require(trials >= 1, "trials must be positive");
  require(n_samples >= 4 * mode_max + 4, "n_samples must be at least 4 K + 4");
}

namespace {

// splitmix64: portable stream of uniforms keyed by (seed, trial, draw).
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Stream {
  std::uint64_t state;
  double uniform() {
    state = splitmix(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
};

}  // namespace

DeficitExperiment deficit_experiment(const DeficitConfig& config) {
  config.validate();
  DeficitExperiment out;
  const int nn = static_cast<int>(config.norms.size());
  const double P_ball = kTwoPi;
  out.c0_envelope = std::numeric_limits<double>::infinity();
  out.c1_envelope = std::numeric_limits<double>::infinity();
  out.all_positive = true;
  for (int trial = 0; trial < config.trials; ++trial) {
    const double t = config.norms[trial % nn];
    Stream rng{splitmix(config.seed) ^ splitmix(0xA5A5A5A5ULL + static_cast<std::uint64_t>(trial))};
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100) throw NumericalFailure("deficit experiment: too many rejected draws");
      FourierCurve c = FourierCurve::circle(1.0, {}, config.mode_max, config.n_samples);
      for (int k = config.mode_min; k <= config.mode_max; ++k) {
        c.a[k] = 2.0 * rng.uniform() - 1.0;
        c.b[k] = 2.0 * rng.uniform() - 1.0;
      }
      const double scale = t / w22_norm(c);
      for (int k = config.mode_min; k <= config.mode_max; ++k) c.a[k] *= scale, c.b[k] *= scale;
      Perturbation p;
      try {
        p = project_constraints(c);
        p.curve.validate();
      } catch (const std::exception&) {
        ++out.rejected;
        continue;
      }
      DeficitSample s;
      s.trial = trial;
      s.t = t;
      s.exact_deficit = elastica_energy(p.curve) - kTwoPi;
      s.quadratic_prediction = constrained_quadratic_form(p.curve);
      const double asym = asymmetry(p.curve).value / kPi;
      s.asymmetry_sq = asym * asym;
      s.perimeter_deficit = perimeter(p.curve) - P_ball;
      s.ratio_c0 = s.exact_deficit / s.asymmetry_sq;
      s.ratio_c1 = s.exact_deficit / (s.perimeter_deficit / P_ball);
      if (!(s.exact_deficit > 0.0 && s.ratio_c0 > 0.0 && s.ratio_c1 > 0.0 && s.perimeter_deficit >= 0.0))
        out.all_positive = false;
      out.c0_envelope = std::min(out.c0_envelope, s.ratio_c0);
      out.c1_envelope = std::min(out.c1_envelope, s.ratio_c1);
      out.samples.push_back(s);
      break;
    }
  }
  std::vector<double> r0;
  for (const auto& s : out.samples) r0.push_back(s.ratio_c0);
  std::sort(r0.begin(), r0.end());
  out.c0_q05 = r0[static_cast<std::size_t>(0.05 * static_cast<double>(r0.size() - 1))];
  return out;
}

std::string deficit_csv(const std::vector<DeficitSample>& samples) {
  std::string out = "t,deficit,prediction,asymmetry_sq,perimeter_deficit,ratio_c0,ratio_c1\n";
  char buf[256];
  for (const DeficitSample& s : samples) {
    std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n", s.t, s.exact_deficit,
                  s.quadratic_prediction, s.asymmetry_sq, s.perimeter_deficit, s.ratio_c0, s.ratio_c1);
    out += buf;
  }
  return out;
}

}  // namespace cdrops::stability
