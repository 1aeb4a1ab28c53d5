#include "cdrops/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <unistd.h>

#include "cdrops/types.hpp"

namespace cdrops::io {

namespace {

// Checks an object's keys against a whitelist and reads typed fields,
// reporting failures as "<where>.<key>".
class Reader {
 public:
  Reader(const Json& j, std::string where, std::initializer_list<const char*> allowed) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw InvalidInput(where_ + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw InvalidInput(where_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const {
    if (!has(key)) throw InvalidInput(name(key) + ": missing");
    return j_.at(key);
  }
  std::string name(const char* key) const { return where_ + "." + key; }

  double number(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number()) throw InvalidInput(name(key) + ": expected a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw InvalidInput(name(key) + ": expected an integer");
    return v.get<long long>();
  }
  long long integer(const char* key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_boolean()) throw InvalidInput(name(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_string()) throw InvalidInput(name(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const Json& v = at(key);
    if (!v.is_array()) throw InvalidInput(name(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw InvalidInput(name(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Point point(const char* key, int dim) const {
    const std::vector<double> v = numbers(key);
    if (static_cast<int>(v.size()) != dim) throw InvalidInput(name(key) + ": expected " + std::to_string(dim) + " components");
    return {v[0], v[1], dim == 3 ? v[2] : 0.0};
  }

 private:
  const Json& j_;
  std::string where_;
};

Json point_json(Point p, int dim) {
  Json a = Json::array({p.x, p.y});
  if (dim == 3) a.push_back(p.z);
  return a;
}

int read_dim(const Reader& r) {
  const long long d = r.integer("dim");
  if (d != 2 && d != 3) throw InvalidInput(r.name("dim") + ": must be 2 or 3");
  return static_cast<int>(d);
}

// NaN and infinities have no JSON spelling; they become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

FourierCurve curve_from(const Json& j, const std::string& where) {
  Reader r(j, where, {"dim", "center", "base_radius", "coeffs", "n_samples"});
  if (read_dim(r) != 2) throw InvalidInput(r.name("dim") + ": Fourier curves are planar");
  FourierCurve c;
  c.center = r.point("center", 2);
  c.base_radius = r.number("base_radius");
  c.n_samples = static_cast<int>(r.integer("n_samples", 1024));
  Reader co(r.at("coeffs"), r.name("coeffs"), {"a0", "a", "b"});
  const std::vector<double> a = co.numbers("a");
  const std::vector<double> b = co.numbers("b");
  if (a.size() != b.size()) throw InvalidInput(co.name("b") + ": must have as many entries as a");
  c.a.assign(a.size() + 1, 0.0);
  c.b.assign(a.size() + 1, 0.0);
  c.a[0] = co.number("a0");
  for (std::size_t k = 0; k < a.size(); ++k) c.a[k + 1] = a[k], c.b[k + 1] = b[k];
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(where + ": " + e.what());
  }
  return c;
}

Boundary boundary_from(const Json& j, const std::string& where) {
  if (j.is_object() && j.contains("coeffs")) return curve_from(j, where);
  Reader r(j, where, {"dim", "center", "radius"});
  Ball b;
  b.dim = read_dim(r);
  if (b.dim != 2) throw InvalidInput(r.name("dim") + ": configuration boundaries are planar");
  b.center = r.point("center", 2);
  b.radius = r.number("radius");
  return b;
}

}  // namespace

Json to_json(const FourierCurve& c) {
  Json a = Json::array(), b = Json::array();
  for (int k = 1; k <= c.modes(); ++k) a.push_back(c.a[k]), b.push_back(c.b[k]);
  return Json{{"dim", 2},
              {"center", point_json(c.center, 2)},
              {"base_radius", c.base_radius},
              {"coeffs", Json{{"a0", c.a[0]}, {"a", a}, {"b", b}}},
              {"n_samples", c.n_samples}};
}

namespace {

Json boundary_json(const Boundary& b) {
  if (const auto* c = std::get_if<FourierCurve>(&b)) return to_json(*c);
  const Ball& ball = std::get<Ball>(b);
  return Json{{"dim", ball.dim}, {"center", point_json(ball.center, ball.dim)}, {"radius", ball.radius}};
}

}  // namespace

Shape shape_from_json(const Json& j) {
  const std::string where = "shape";
  if (!j.is_object()) throw InvalidInput(where + ": expected a JSON object");
  Shape out;
  if (j.contains("coeffs")) {
    out = curve_from(j, where);
  } else if (j.contains("r_in") || j.contains("r_out")) {
    Reader r(j, where, {"dim", "r_in", "r_out", "offset"});
    AnnulusSpec a;
    a.dim = read_dim(r);
    a.r_in = r.number("r_in");
    a.r_out = r.number("r_out");
    a.offset = r.has("offset") ? r.point("offset", a.dim) : Point{};
    out = a;
  } else if (j.contains("components")) {
    Reader r(j, where, {"dim", "components"});
    Configuration c;
    c.dim = read_dim(r);
    if (c.dim != 2) throw InvalidInput(r.name("dim") + ": configurations are planar");
    const Json& comps = r.at("components");
    if (!comps.is_array()) throw InvalidInput(r.name("components") + ": expected an array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string w = where + ".components[" + std::to_string(i) + "]";
      Reader cr(comps[i], w, {"outer", "holes"});
      Component comp;
      comp.outer = boundary_from(cr.at("outer"), cr.name("outer"));
      if (cr.has("holes")) {
        const Json& holes = cr.at("holes");
        if (!holes.is_array()) throw InvalidInput(cr.name("holes") + ": expected an array");
        for (std::size_t h = 0; h < holes.size(); ++h)
          comp.holes.push_back(boundary_from(holes[h], cr.name("holes") + "[" + std::to_string(h) + "]"));
      }
      c.components.push_back(std::move(comp));
    }
    out = c;
  } else {
    Reader r(j, where, {"dim", "center", "radius"});
    Ball b;
    b.dim = read_dim(r);
    b.center = r.point("center", b.dim);
    b.radius = r.number("radius");
    out = b;
  }
  try {
    std::visit([](const auto& s) { s.validate(); }, out);
  } catch (const InvalidInput& e) {
    throw InvalidInput(where + ": " + e.what());
  }
  return out;
}

Json to_json(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierCurve>) {
          return to_json(s);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Json{{"dim", s.dim}, {"center", point_json(s.center, s.dim)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, AnnulusSpec>) {
          return Json{{"dim", s.dim}, {"r_in", s.r_in}, {"r_out", s.r_out}, {"offset", point_json(s.offset, s.dim)}};
        } else {
          Json comps = Json::array();
          for (const auto& c : s.components) {
            Json holes = Json::array();
            for (const auto& h : c.holes) holes.push_back(boundary_json(h));
            comps.push_back(Json{{"outer", boundary_json(c.outer)}, {"holes", holes}});
          }
          return Json{{"dim", s.dim}, {"components", comps}};
        }
      },
      shape);
}

Json to_json(const EnergyReport& r) {
  return Json{{"perimeter", num(r.perimeter_raw)},
              {"bending", num(r.bending_term)},
              {"riesz", num(r.riesz_raw)},
              {"total", num(r.total)},
              {"riesz_error", num(r.riesz_error_estimate)},
              {"method", r.method},
              {"lambda", r.lambda},
              {"Q", r.Q},
              {"perimeter_term", num(r.perimeter_term)},
              {"riesz_term", num(r.riesz_term)}};
}

Json to_json(const phase::ThresholdResult& r) {
  return Json{{"lambda_bar", r.lambda_bar},
              {"bracket", Json::array({r.bracket.first, r.bracket.second})},
              {"residual", r.residual},
              {"iterations", r.iterations}};
}

Json to_json(const annulus::OptimalAnnulus& r) {
  return Json{{"lambda", r.lambda},     {"Q", r.Q},
              {"alpha", r.alpha},       {"r_star", r.r_star},
              {"r_out", std::sqrt(1.0 + r.r_star * r.r_star)},
              {"energy", r.energy},     {"r_lambda", r.r_lambda},
              {"shift", r.shift},       {"derivative", r.derivative},
              {"bracket", Json::array({r.bracket_lo, r.bracket_hi})}};
}

Json to_json(const phase::Competitor& c) {
  if (!c.found()) return nullptr;
  return Json{{"N", c.N}, {"R", c.R}, {"energy", num(c.energy)}, {"error", num(c.error)}};
}

Json to_json(const phase::Certificate& c) {
  return Json{{"certified", c.certified},
              {"witness", to_json(c.witness)},
              {"lower_bound", num(c.lower_bound)},
              {"margin", num(c.margin)},
              {"evaluated", c.evaluated}};
}

Json to_json(const phase::PhaseCell& c) {
  return Json{{"lambda", c.lambda},
              {"Q", c.Q},
              {"alpha", c.alpha},
              {"dim", c.dim},
              {"classification", phase::region_name(c.classification)},
              {"ball_energy", num(c.ball_energy)},
              {"ball_error", num(c.ball_error)},
              {"annulus_energy", num(c.annulus_energy)},
              {"annulus_r", num(c.annulus_r)},
              {"annulus_error", num(c.annulus_error)},
              {"best_competitor", to_json(c.best_competitor)},
              {"connected_lower_bound", num(c.connected_lower_bound)},
              {"lambda_above_bar", c.lambda_above_bar},
              {"q_over_ball_envelope", num(c.q_over_ball_envelope)},
              {"q_over_annulus_envelope", num(c.q_over_annulus_envelope)},
              {"q_over_nonexist_envelope", num(c.q_over_nonexist_envelope)},
              {"note", c.note}};
}

Json to_json(const phase::MassMapEntry& e) {
  return Json{{"mass", e.mass}, {"lambda", e.lambda}, {"Q", e.Q}, {"prefactor", e.prefactor}, {"cell", to_json(e.cell)}};
}

Json to_json(const stability::DeficitExperiment& e) {
  double worst_gap = 0.0;
  for (const auto& s : e.samples)
    worst_gap = std::max(worst_gap, std::abs(s.exact_deficit - s.quadratic_prediction) / s.exact_deficit);
  return Json{{"samples", e.samples.size()},
              {"rejected", e.rejected},
              {"all_positive", e.all_positive},
              {"c0_envelope", e.c0_envelope},
              {"c0_q05", e.c0_q05},
              {"c1_envelope", e.c1_envelope},
              {"max_relative_taylor_gap", worst_gap}};
}

Json to_json(const optim::OptimResult& r) {
  const auto& s = r.final_state;
  Json shape;
  if (s.shape.topology == optim::Topology::Ball) {
    shape = to_json(s.shape.outer);
  } else {
    shape = Json{{"outer", to_json(s.shape.outer)},
                 {"inner", to_json(s.shape.inner)},
                 {"offset", point_json(s.shape.offset, 2)}};
  }
  return Json{{"converged", r.converged},
              {"stop_reason", r.stop_reason},
              {"iterations", s.iteration},
              {"energy", s.energy},
              {"grad_norm", s.grad_norm},
              {"step", s.step},
              {"classification_hint", r.classification_hint},
              {"distance_to_primitive", r.distance_to_primitive},
              {"rejected_steps", r.rejected_steps},
              {"cell_spacing", r.cell_spacing},
              {"shape", shape}};
}

QuadratureControls quad_from_json(const Json& j) {
  Reader r(j, "quad",
           {"radial_order", "grading_levels", "angular_nodes", "mc_samples", "seed", "target_rel_error",
            "cell_target_rel_error", "cells_per_radius", "max_cells"});
  QuadratureControls q;
  q.radial_order = static_cast<int>(r.integer("radial_order", q.radial_order));
  q.grading_levels = static_cast<int>(r.integer("grading_levels", q.grading_levels));
  q.angular_nodes = static_cast<int>(r.integer("angular_nodes", q.angular_nodes));
  q.mc_samples = r.integer("mc_samples", q.mc_samples);
  const long long seed = r.integer("seed", static_cast<long long>(q.seed));
  if (seed < 0) throw InvalidInput(r.name("seed") + ": must be non-negative");
  q.seed = static_cast<std::uint64_t>(seed);
  q.target_rel_error = r.number("target_rel_error", q.target_rel_error);
  q.cell_target_rel_error = r.number("cell_target_rel_error", q.cell_target_rel_error);
  q.cells_per_radius = static_cast<int>(r.integer("cells_per_radius", q.cells_per_radius));
  q.max_cells = r.integer("max_cells", q.max_cells);
  require(q.radial_order >= 2 && q.grading_levels >= 0 && q.angular_nodes >= 2 && q.mc_samples >= 2 &&
              q.target_rel_error > 0.0 && q.cell_target_rel_error > 0.0 && q.cells_per_radius >= 2 &&
              q.max_cells >= 16,
          "quad: control out of range");
  return q;
}

ScanJob scan_job_from_json(const Json& j) {
  Reader r(j, "config",
           {"lambda_min", "lambda_max", "Q_min", "Q_max", "n_lambda", "n_Q", "alpha", "threads", "search", "quad",
            "csv", "svg"});
  ScanJob job;
  auto& c = job.config;
  c.lambda_min = r.number("lambda_min", c.lambda_min);
  c.lambda_max = r.number("lambda_max", c.lambda_max);
  c.Q_min = r.number("Q_min", c.Q_min);
  c.Q_max = r.number("Q_max", c.Q_max);
  c.n_lambda = static_cast<int>(r.integer("n_lambda", c.n_lambda));
  c.n_Q = static_cast<int>(r.integer("n_Q", c.n_Q));
  c.alpha = r.number("alpha", c.alpha);
  c.threads = static_cast<int>(r.integer("threads", c.threads));
  if (r.has("search")) {
    Reader s(r.at("search"), r.name("search"), {"n_max", "r_points", "r_span"});
    c.search.n_max = static_cast<int>(s.integer("n_max", c.search.n_max));
    c.search.r_points = static_cast<int>(s.integer("r_points", c.search.r_points));
    c.search.r_span = s.number("r_span", c.search.r_span);
  }
  if (r.has("quad")) c.quad = quad_from_json(r.at("quad"));
  job.csv_path = r.string("csv", "");
  job.svg_path = r.string("svg", "");
  c.validate();
  return job;
}

StabilityJob stability_job_from_json(const Json& j) {
  Reader r(j, "config", {"mode_min", "mode_max", "norms", "trials", "seed", "n_samples", "csv"});
  StabilityJob job;
  auto& c = job.config;
  c.mode_min = static_cast<int>(r.integer("mode_min", c.mode_min));
  c.mode_max = static_cast<int>(r.integer("mode_max", c.mode_max));
  if (r.has("norms")) c.norms = r.numbers("norms");
  c.trials = static_cast<int>(r.integer("trials", c.trials));
  const long long seed = r.integer("seed", static_cast<long long>(c.seed));
  if (seed < 0) throw InvalidInput(r.name("seed") + ": must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.n_samples = static_cast<int>(r.integer("n_samples", c.n_samples));
  job.csv_path = r.string("csv", "");
  c.validate();
  return job;
}

MinimizeJob minimize_job_from_json(const Json& j) {
  Reader r(j, "config", {"shape", "lambda", "Q", "alpha", "quad", "budget", "trajectory_csv"});
  MinimizeJob job;
  const Json& sj = r.at("shape");
  if (sj.is_object() && sj.contains("outer")) {
    Reader s(sj, r.name("shape"), {"outer", "inner", "offset"});
    job.shape.topology = optim::Topology::Annulus;
    job.shape.outer = curve_from(s.at("outer"), s.name("outer"));
    job.shape.inner = curve_from(s.at("inner"), s.name("inner"));
    job.shape.offset = s.has("offset") ? s.point("offset", 2) : Point{};
    job.shape.inner.center = job.shape.outer.center + job.shape.offset;
  } else {
    job.shape.topology = optim::Topology::Ball;
    job.shape.outer = curve_from(sj, r.name("shape"));
  }
  job.params.lambda = r.number("lambda");
  job.params.Q = r.number("Q", 0.0);
  job.params.alpha = r.number("alpha", 1.0);
  job.params.dim = 2;
  if (r.has("quad")) job.params.quad = quad_from_json(r.at("quad"));
  if (r.has("budget")) {
    Reader b(r.at("budget"), r.name("budget"),
             {"max_iterations", "grad_tol", "initial_step", "max_step", "max_halvings", "fd_step", "min_gap",
              "cells_across_gap", "lbfgs_memory", "round_boundaries"});
    auto& o = job.budget;
    o.max_iterations = static_cast<int>(b.integer("max_iterations", o.max_iterations));
    o.grad_tol = b.number("grad_tol", o.grad_tol);
    o.initial_step = b.number("initial_step", o.initial_step);
    o.max_step = b.number("max_step", o.max_step);
    o.max_halvings = static_cast<int>(b.integer("max_halvings", o.max_halvings));
    o.fd_step = b.number("fd_step", o.fd_step);
    o.min_gap = b.number("min_gap", o.min_gap);
    o.cells_across_gap = static_cast<int>(b.integer("cells_across_gap", o.cells_across_gap));
    o.lbfgs_memory = static_cast<int>(b.integer("lbfgs_memory", o.lbfgs_memory));
    o.round_boundaries = b.boolean("round_boundaries", o.round_boundaries);
  }
  job.trajectory_path = r.string("trajectory_csv", "");
  job.params.validate();
  job.shape.validate();
  return job;
}

Json parse(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(what + ": malformed JSON (" + e.what() + ")");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput(path + ": cannot write");
    out << content;
    out.flush();
    if (!out) throw InvalidInput(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InvalidInput(path + ": rename failed (" + ec.message() + ")");
  }
}

}  // namespace cdrops::io
