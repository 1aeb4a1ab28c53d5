#include "cdrops/phase_diagram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "cdrops/annulus.hpp"
#include "cdrops/geometry.hpp"
#include "cdrops/riesz.hpp"
#include "cdrops/types.hpp"

namespace cdrops::phase {

double ball_annulus_gap(double lambda) {
  return kTwoPi * (lambda + 1.0) - annulus::f_lambda(lambda, annulus::r_lambda(lambda));
}

ThresholdResult lambda_bar(double tolerance) {
  require(std::isfinite(tolerance) && tolerance > 0.0, "tolerance must be positive");
  double lo = 1e-3;
  double hi = std::sqrt(0.5);
  if (!(ball_annulus_gap(lo) > 0.0 && ball_annulus_gap(hi) < 0.0))
    throw NumericalFailure("lambda_bar: gap does not change sign on the bracket");
  ThresholdResult out;
  double mid = 0.5 * (lo + hi);
  double g = ball_annulus_gap(mid);
  while ((hi - lo > tolerance || std::abs(g) > tolerance) && hi - lo > 4.0 * std::numeric_limits<double>::epsilon()) {
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
    mid = 0.5 * (lo + hi);
    g = ball_annulus_gap(mid);
    ++out.iterations;
  }
  out.lambda_bar = mid;
  out.bracket = {lo, hi};
  out.residual = std::abs(g);
  return out;
}

double lambda_bar_value() {
  static const double value = lambda_bar(1e-15).lambda_bar;
  return value;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Ball: return "BALL";
    case Region::Annulus: return "ANNULUS";
    case Region::NonexistenceCertified: return "NONEXISTENCE_CERTIFIED";
    case Region::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

namespace {

// Lower bound for the minimum of a convex F on [2, inf). dF is a right
// derivative, so F(x) >= F(lo) + dF(lo) (x - lo) on the final bracket.
double convex_min_from_two(const std::function<double(double)>& F, const std::function<double(double)>& dF,
                           double tail_limit) {
  double a = 2.0;
  if (dF(a) >= 0.0) return F(a) - 1e-14 * std::abs(F(a));
  double c = 4.0;
  while (dF(c) < 0.0) {
    a = c;
    c *= 2.0;
    if (c > 1e150) return tail_limit;  // decreasing all the way out
  }
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a, hi = c;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = F(x1), f2 = F(x2);
  while (hi - lo > 1e-13 * hi) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1, f2 = f1;
      x1 = hi - invphi * (hi - lo), f1 = F(x1);
    } else {
      lo = x1;
      x1 = x2, f1 = f2;
      x2 = lo + invphi * (hi - lo), f2 = F(x2);
    }
  }
  const double base = F(lo);
  return base + std::min(0.0, dF(lo)) * (hi - lo) - 1e-14 * std::abs(base);
}

}  // namespace

double connected_lower_bound_2d(double lambda, double Q, double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be non-negative");
  require(std::isfinite(Q) && Q >= 0.0, "Q must be non-negative");
  require(lambda > 0.0 || Q > 0.0, "lower bound degenerates for lambda = Q = 0");
  const double pi2 = kPi * kPi;
  auto F = [&](double d) { return 2.0 * lambda * d + 4.0 * kPi / d + Q * pi2 * std::pow(d, alpha - 2.0); };
  auto dF = [&](double d) {
    return 2.0 * lambda - 4.0 * kPi / (d * d) + Q * pi2 * (alpha - 2.0) * std::pow(d, alpha - 3.0);
  };
  return convex_min_from_two(F, dF, 0.0);
}

double connected_lower_bound_3d(double lambda, double Q, double alpha) {
  require(alpha > 0.0 && alpha < 3.0, "alpha must lie in (0, 3)");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be non-negative");
  require(std::isfinite(Q) && Q >= 0.0, "Q must be non-negative");
  const double A = kPi * std::sqrt(lambda);
  const double B = 4.0 * kPi * (1.0 + lambda);
  const double C = Q * std::pow(4.0 * kPi / 3.0, 2);
  auto F = [&](double d) { return std::max(A * d, B) + C * std::pow(d, alpha - 3.0); };
  auto dF = [&](double d) { return (A * d >= B ? A : 0.0) + C * (alpha - 3.0) * std::pow(d, alpha - 4.0); };
  return convex_min_from_two(F, dF, B);
}

namespace {

// A competitor only has to stay an upper bound, and its error bar is added to
// its energy, so thin rings are accepted at a looser relative target.
QuadratureControls competitor_quad(const QuadratureControls& quad) {
  QuadratureControls q = quad;
  q.target_rel_error = std::max(q.target_rel_error, 1e-4);
  return q;
}

}  // namespace

Competitor competitor_multi_annuli_2d(int N, double R, double lambda, double Q, double alpha,
                                      const QuadratureControls& quad) {
  require(N >= 2, "competitor needs N >= 2");
  require(std::isfinite(R) && R > 0.0, "competitor needs R > 0");
  require(lambda >= 0.0 && Q >= 0.0, "lambda and Q must be non-negative");
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  require(R > s, "competitor needs R^2 > 1/N");
  const double r_in = std::sqrt((R - s) * (R + s));
  Competitor c;
  c.N = N;
  c.R = R;
  c.energy = N * (lambda * kTwoPi * (r_in + R) + kTwoPi * (1.0 / r_in + 1.0 / R));
  if (Q > 0.0) {
    const RieszResult v = riesz::annulus_covariogram(2, alpha, R, r_in, Point{}, competitor_quad(quad));
    c.energy += N * Q * v.value;
    c.error = N * Q * v.error;
  }
  c.error += 1e-14 * c.energy;
  return c;
}

Competitor competitor_multi_shells_3d(int N, double R, double lambda, double Q, double alpha,
                                      const QuadratureControls& quad) {
  require(N >= 2, "competitor needs N >= 2");
  require(std::isfinite(R) && R > 0.0, "competitor needs R > 0");
  require(lambda >= 0.0 && Q >= 0.0, "lambda and Q must be non-negative");
  require(alpha > 0.0 && alpha < 3.0, "alpha must lie in (0, 3)");
  const double h = annulus::shell_thickness_3d(R, N);
  const double Rh = R + h;
  Competitor c;
  c.N = N;
  c.R = R;
  c.energy = N * (lambda * 4.0 * kPi * (R * R + Rh * Rh) + 8.0 * kPi);
  if (Q > 0.0) {
    const RieszResult v = riesz::annulus_covariogram(3, alpha, Rh, R, Point{}, competitor_quad(quad));
    c.energy += N * Q * v.value;
    c.error = N * Q * v.error;
  }
  c.error += 1e-14 * c.energy;
  return c;
}

namespace {

// Grid search over N in [2, n_max] and a log grid in R around the seed. The
// interface terms alone bound a candidate from below, which prunes most of
// the Riesz evaluations. Candidates are then re-evaluated with error bars in
// order of energy; very thin rings can defeat the quadrature, and those are
// skipped rather than failing the whole search.
constexpr double kMinRelativeWidth = 1e-6;

Competitor search(int dim, double lambda, double Q, double alpha, const SearchOptions& opts,
                  const QuadratureControls& quad, int* evaluated) {
  require(opts.n_max >= 2 && opts.r_points >= 2 && opts.r_span > 1.0, "invalid competitor search options");
  struct Candidate {
    double energy;
    int N;
    double R;
  };
  std::vector<Candidate> pool;
  double best = std::numeric_limits<double>::infinity();
  int count = 0;
  for (int N = 2; N <= opts.n_max; ++N) {
    double seed;
    if (dim == 2) {
      seed = lambda >= 1.0 ? 1.0 : 1.0 / std::sqrt(lambda);
      if (Q > 0.0) seed = std::max(seed, std::pow(Q / (N * N * lambda), 1.0 / (3.0 - alpha)));
    } else {
      seed = 1.0 / std::sqrt(lambda);
    }
    const double lo = seed / opts.r_span;
    const double hi = seed * opts.r_span;
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    for (int i = 0; i < opts.r_points; ++i) {
      const double R = log_grid(lo, hi, i, opts.r_points);
      double base, r_in = 0.0, r_out = 0.0;
      if (dim == 2) {
        if (!(R > s * (1.0 + 1e-9))) continue;
        r_in = std::sqrt((R - s) * (R + s));
        r_out = R;
        base = N * (lambda * kTwoPi * (r_in + R) + kTwoPi * (1.0 / r_in + 1.0 / R));
      } else {
        r_in = R;
        r_out = R + annulus::shell_thickness_3d(R, N);
        base = N * (lambda * 4.0 * kPi * (r_in * r_in + r_out * r_out) + 8.0 * kPi);
      }
      // Thinner rings lose the radial quadrature to cancellation.
      if (r_out - r_in < kMinRelativeWidth * r_out) continue;
      if (base >= best) continue;
      double energy = base;
      if (Q > 0.0) {
        energy += N * Q * riesz::annulus_covariogram(dim, alpha, r_out, r_in, Point{}, quad, false).value;
        ++count;
      }
      if (!std::isfinite(energy)) continue;
      pool.push_back({energy, N, R});
      best = std::min(best, energy);
    }
  }
  if (evaluated) *evaluated = count;
  std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.energy < b.energy; });
  for (const Candidate& c : pool) {
    try {
      return dim == 2 ? competitor_multi_annuli_2d(c.N, c.R, lambda, Q, alpha, quad)
                      : competitor_multi_shells_3d(c.N, c.R, lambda, Q, alpha, quad);
    } catch (const NumericalFailure&) {
    }
  }
  return Competitor{};
}

Certificate certify(int dim, double lambda, double Q, double alpha, const SearchOptions& opts,
                    const QuadratureControls& quad) {
  Certificate cert;
  cert.lower_bound = dim == 2 ? connected_lower_bound_2d(lambda, Q, alpha) : connected_lower_bound_3d(lambda, Q, alpha);
  cert.witness = search(dim, lambda, Q, alpha, opts, quad, &cert.evaluated);
  if (!cert.witness.found()) {
    cert.margin = -std::numeric_limits<double>::infinity();
    return cert;
  }
  cert.margin = cert.lower_bound - (cert.witness.energy + cert.witness.error);
  cert.certified = cert.margin > 0.0;
  return cert;
}

}  // namespace

Competitor best_competitor_2d(double lambda, double Q, double alpha, const SearchOptions& opts,
                              const QuadratureControls& quad, int* evaluated) {
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(Q) && Q >= 0.0, "Q must be non-negative");
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  return search(2, lambda, Q, alpha, opts, quad, evaluated);
}

Certificate nonexistence_certificate_2d(double lambda, double Q, double alpha, const SearchOptions& opts,
                                        const QuadratureControls& quad) {
  require(alpha > 1.0 && alpha < 2.0, "the planar certificate needs alpha in (1, 2)");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(Q) && Q > 0.0, "Q must be positive");
  return certify(2, lambda, Q, alpha, opts, quad);
}

Certificate nonexistence_certificate_3d(double lambda, double Q, double alpha, const SearchOptions& opts,
                                        const QuadratureControls& quad) {
  require(alpha > 2.0 && alpha < 3.0, "the 3D certificate needs alpha in (2, 3)");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(Q) && Q > 0.0, "Q must be positive");
  return certify(3, lambda, Q, alpha, opts, quad);
}

PhaseCell classify_cell(double lambda, double Q, double alpha, const SearchOptions& opts,
                        const QuadratureControls& quad) {
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  require(std::isfinite(Q) && Q >= 0.0, "Q must be non-negative");
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  PhaseCell cell;
  cell.lambda = lambda;
  cell.Q = Q;
  cell.alpha = alpha;
  cell.dim = 2;

  const double lbar = lambda_bar_value();
  cell.lambda_above_bar = lambda > lbar;
  cell.q_over_ball_envelope = lambda > lbar ? Q / (lambda - lbar) : std::numeric_limits<double>::infinity();
  cell.q_over_annulus_envelope = Q / std::pow(lambda, 0.5 * (3.0 + alpha));
  cell.q_over_nonexist_envelope = Q / (lambda + std::pow(lambda, 0.5 * (alpha - 1.0)));

  cell.ball_energy = kTwoPi * (lambda + 1.0);
  if (Q > 0.0) {
    const RieszResult vb = riesz::ball(2, alpha, 1.0, quad);
    cell.ball_energy += Q * vb.value;
    cell.ball_error = Q * vb.error;
  }
  cell.ball_error += 1e-14 * cell.ball_energy;

  cell.connected_lower_bound = connected_lower_bound_2d(lambda, Q, alpha);
  bool certified = false;
  if (alpha > 1.0 && Q > 0.0) {
    const Certificate cert = certify(2, lambda, Q, alpha, opts, quad);
    cell.best_competitor = cert.witness;
    certified = cert.certified;
  } else {
    cell.best_competitor = search(2, lambda, Q, alpha, opts, quad, nullptr);
  }

  // Very thin optimal annuli (large Q) can defeat the radial quadrature; the
  // certificate does not need the annulus, so a failure here only blocks the
  // energy comparison.
  try {
    const annulus::OptimalAnnulus oa = annulus::optimal_charged_annulus(lambda, Q, alpha, quad);
    cell.annulus_energy = oa.energy;
    cell.annulus_r = oa.r_star;
    if (Q > 0.0) {
      const double r = oa.r_star;
      cell.annulus_error = Q * riesz::annulus_covariogram(2, alpha, std::sqrt(1.0 + r * r), r, Point{}, quad).error;
    }
    cell.annulus_error += 1e-14 * cell.annulus_energy;
  } catch (const NumericalFailure& e) {
    cell.annulus_energy = std::numeric_limits<double>::quiet_NaN();
    cell.annulus_r = std::numeric_limits<double>::quiet_NaN();
    cell.annulus_error = std::numeric_limits<double>::quiet_NaN();
    cell.note = std::string("annulus: ") + e.what();
  }

  if (certified) {
    cell.classification = Region::NonexistenceCertified;
    return cell;
  }
  if (std::isnan(cell.annulus_energy)) {
    cell.classification = Region::Unknown;
    return cell;
  }

  const Competitor& comp = cell.best_competitor;
  auto beats = [](double e, double de, double other, double dother) { return e + de < other - dother; };
  const bool comp_ok_ball = !comp.found() || beats(cell.ball_energy, cell.ball_error, comp.energy, comp.error);
  const bool comp_ok_annulus =
      !comp.found() || beats(cell.annulus_energy, cell.annulus_error, comp.energy, comp.error);
  if (comp_ok_ball && beats(cell.ball_energy, cell.ball_error, cell.annulus_energy, cell.annulus_error))
    cell.classification = Region::Ball;
  else if (comp_ok_annulus && beats(cell.annulus_energy, cell.annulus_error, cell.ball_energy, cell.ball_error))
    cell.classification = Region::Annulus;
  else
    cell.classification = Region::Unknown;
  return cell;
}

void ScanConfig::validate() const {
  require(std::isfinite(lambda_min) && lambda_min > 0.0 && lambda_max >= lambda_min, "invalid lambda range");
  require(std::isfinite(Q_min) && Q_min > 0.0 && Q_max >= Q_min, "invalid Q range (log grid needs Q_min > 0)");
  require(std::isfinite(lambda_max) && std::isfinite(Q_max), "ranges must be finite");
  require(n_lambda >= 1 && n_Q >= 1, "resolution must be positive");
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
  require(threads >= 0, "threads must be non-negative");
  require(search.n_max >= 2 && search.r_points >= 2 && search.r_span > 1.0, "invalid competitor search options");
  EnergyParams probe;
  probe.alpha = alpha;
  probe.quad = quad;
  probe.validate();
}

double log_grid(double lo, double hi, int i, int n) {
  if (n <= 1) return lo;
  return lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("CHARGED_DROPS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

std::vector<PhaseCell> scan(const ScanConfig& config) {
  config.validate();
  const int total = config.n_lambda * config.n_Q;
  std::vector<PhaseCell> cells(total);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx = next++; idx < total; idx = next++) {
      const double lambda = log_grid(config.lambda_min, config.lambda_max, idx / config.n_Q, config.n_lambda);
      const double Q = log_grid(config.Q_min, config.Q_max, idx % config.n_Q, config.n_Q);
      try {
        cells[idx] = classify_cell(lambda, Q, config.alpha, config.search, config.quad);
      } catch (const std::exception& e) {
        PhaseCell failed;
        failed.lambda = lambda;
        failed.Q = Q;
        failed.alpha = config.alpha;
        failed.classification = Region::Unknown;
        failed.note = e.what();
        cells[idx] = failed;
      }
    }
  };
  const int n_threads = std::min(resolve_threads(config.threads), total);
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::string scan_csv(const std::vector<PhaseCell>& cells) {
  std::string out =
      "lambda,Q,alpha,dim,ball_energy,annulus_energy,annulus_r,competitor_N,competitor_R,competitor_energy,"
      "lower_bound,classification\n";
  for (const PhaseCell& c : cells) {
    out += num(c.lambda) + "," + num(c.Q) + "," + num(c.alpha) + "," + std::to_string(c.dim) + "," +
           num(c.ball_energy) + "," + num(c.annulus_energy) + "," + num(c.annulus_r) + "," +
           std::to_string(c.best_competitor.N) + "," + num(c.best_competitor.R) + "," +
           num(c.best_competitor.found() ? c.best_competitor.energy : std::numeric_limits<double>::infinity()) +
           "," + num(c.connected_lower_bound) + "," + region_name(c.classification) + "\n";
  }
  return out;
}

std::string scan_svg(const std::vector<PhaseCell>& cells, const ScanConfig& config) {
  const double left = 80, top = 30, plot = 480, legend_w = 230;
  const double width = left + plot + legend_w, height = top + plot + 60;
  const int nl = config.n_lambda, nq = config.n_Q;
  const double cw = plot / nl, ch = plot / nq;
  auto color = [](Region r) {
    switch (r) {
      case Region::Ball: return "#4c78a8";
      case Region::Annulus: return "#f58518";
      case Region::NonexistenceCertified: return "#e45756";
      case Region::Unknown: return "#bab0ac";
    }
    return "#bab0ac";
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"white\"/>\n";
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const int i = static_cast<int>(idx) / nq;  // lambda index, x axis
    const int j = static_cast<int>(idx) % nq;  // Q index, y axis upward
    s << "<rect x=\"" << num(left + i * cw) << "\" y=\"" << num(top + (nq - 1 - j) * ch) << "\" width=\""
      << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << color(cells[idx].classification)
      << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot) << "\" height=\""
    << num(plot) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Decade ticks on both log axes.
  auto ticks = [&](double lo, double hi, bool x_axis) {
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int e = static_cast<int>(std::ceil(llo - 1e-12)); e <= static_cast<int>(std::floor(lhi + 1e-12)); ++e) {
      const double frac = lhi > llo ? (e - llo) / (lhi - llo) : 0.5;
      if (x_axis) {
        const double x = left + cw / 2 + frac * (plot - cw);
        s << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + plot) << "\" x2=\"" << num(x) << "\" y2=\""
          << num(top + plot + 5) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot + 18) << "\" text-anchor=\"middle\">1e" << e
          << "</text>\n";
      } else {
        const double y = top + plot - ch / 2 - frac * (plot - ch);
        s << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\""
          << num(y) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << e
          << "</text>\n";
      }
    }
  };
  ticks(config.lambda_min, config.lambda_max, true);
  ticks(config.Q_min, config.Q_max, false);
  s << "<text x=\"" << num(left + plot / 2) << "\" y=\"" << num(top + plot + 40)
    << "\" text-anchor=\"middle\">lambda (log scale)</text>\n";
  s << "<text x=\"20\" y=\"" << num(top + plot / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << num(top + plot / 2) << ")\">Q (log scale)</text>\n";
  s << "<text x=\"" << num(left) << "\" y=\"18\">alpha = " << num(config.alpha) << "</text>\n";

  const Region order[] = {Region::Ball, Region::Annulus, Region::NonexistenceCertified, Region::Unknown};
  for (int k = 0; k < 4; ++k) {
    const double y = top + 10 + 24 * k;
    s << "<rect x=\"" << num(left + plot + 20) << "\" y=\"" << num(y) << "\" width=\"16\" height=\"16\" fill=\""
      << color(order[k]) << "\"/>\n";
    s << "<text x=\"" << num(left + plot + 44) << "\" y=\"" << num(y + 13) << "\">" << region_name(order[k])
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<MassMapEntry> mass_map(double lambda, double Q, double alpha, const std::vector<double>& masses,
                                   const SearchOptions& opts, const QuadratureControls& quad) {
  std::vector<MassMapEntry> out;
  for (double m : masses) {
    EnergyParams p;
    p.lambda = lambda;
    p.Q = Q;
    p.alpha = alpha;
    p.dim = 2;
    p.quad = quad;
    const RescaledParams rp = rescale_mass(p, MassBudget{m, 2});
    MassMapEntry e;
    e.mass = m;
    e.lambda = rp.params.lambda;
    e.Q = rp.params.Q;
    e.prefactor = rp.prefactor;
    e.cell = classify_cell(e.lambda, e.Q, alpha, opts, quad);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace cdrops::phase
