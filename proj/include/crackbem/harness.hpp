#pragma once

// Configuration-driven batch commands: forward solves, asymptotic comparisons,
// convergence studies, energy checks and topological-derivative maps.
//
// Config boundary conventions: angles are in degrees and give the direction of
// the crack normal e_perp, measured counter-clockwise from the x axis.
// Internally everything is in radians.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crackbem/asymptotics.hpp"
#include "crackbem/bem.hpp"
#include "crackbem/convergence.hpp"
#include "crackbem/crack.hpp"
#include "crackbem/errors.hpp"
#include "crackbem/mesh.hpp"
#include "crackbem/study.hpp"

namespace crackbem::harness {

using json = nlohmann::json;

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kSolverFailure = 3 };

struct GeometryConfig {
  std::string kind = "disk";
  Shape shape = DiskShape{1.0};
  Vec2 center{};
};

struct FourierComponent {
  std::vector<double> cos_coeffs;  ///< a_0, a_1, ...  (cos k t, k >= 0)
  std::vector<double> sin_coeffs;  ///< b_1, b_2, ...  (sin k t, k >= 1)
  double operator()(double t) const {
    double v = 0.0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k) v += cos_coeffs[k] * std::cos(static_cast<double>(k) * t);
    for (std::size_t k = 0; k < sin_coeffs.size(); ++k) v += sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * t);
    return v;
  }
};

struct LoadConfig {
  std::string kind = "constant-stress";
  Matrix2 stress = Matrix2::zero();
  FourierComponent fx, fy;  ///< Traction components as functions of the curve parameter.
};

struct CrackConfig {
  Vec2 center{};
  double angle_deg = 90.0;  ///< Direction of e_perp.
  std::vector<double> lengths;
};

struct DiscretizationConfig {
  int n_boundary = 256;
  int n_cheb_modes = 32;
  double tol = 1e-11;
};

struct OutputConfig {
  std::string directory = "out";
  int precision = 17;
};

struct TdMapConfig {
  int grid = 8;
  int n_angles = 36;
};

struct ExperimentConfig {
  double lambda = 1.0, mu = 1.0;
  GeometryConfig geometry;
  LoadConfig load;
  CrackConfig crack;
  DiscretizationConfig discretization;
  OutputConfig output;
  TdMapConfig td_map;

  LameParams material() const { return LameParams(lambda, mu); }
  CrackSegment crack_template(double length) const {
    const double a = crack.angle_deg * pi / 180.0 - 0.5 * pi;  // tangent = e_perp rotated by -90 degrees
    return CrackSegment(crack.center, a, length);
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

/// Object reader that rejects unknown keys.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing required key");
    return j_.at(key);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key) { return as_number(at(key), sub(key)); }
  double number_or(const std::string& key, double dflt) {
    const json* v = find(key);
    return v ? as_number(*v, sub(key)) : dflt;
  }
  int integer_or(const std::string& key, int dflt) {
    const json* v = find(key);
    if (!v) return dflt;
    if (!v->is_number_integer()) throw ConfigError(sub(key) + ": expected an integer");
    return v->get<int>();
  }
  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(sub(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, const std::string& dflt) {
    const json* v = find(key);
    if (!v) return dflt;
    if (!v->is_string()) throw ConfigError(sub(key) + ": expected a string");
    return v->get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) { return as_numbers(at(key), sub(key)); }
  std::vector<double> numbers_or(const std::string& key) {
    const json* v = find(key);
    return v ? as_numbers(*v, sub(key)) : std::vector<double>{};
  }
  Vec2 point(const std::string& key) { return as_point(at(key), sub(key)); }
  Vec2 point_or(const std::string& key, Vec2 dflt) {
    const json* v = find(key);
    return v ? as_point(*v, sub(key)) : dflt;
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

  /// Throws on any key that was never requested.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path_ + "." + it.key() + ": unknown key");
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + ": must be finite");
    return d;
  }
  static std::vector<double> as_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }
  static Vec2 as_point(const json& v, const std::string& where) {
    const auto p = as_numbers(v, where);
    if (p.size() != 2) throw ConfigError(where + ": expected [x, y]");
    return {p[0], p[1]};
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline FourierComponent parse_fourier_component(const json& j, const std::string& path) {
  StrictObject o(j, path);
  FourierComponent c{o.numbers_or("cos"), o.numbers_or("sin")};
  o.finish();
  return c;
}

}  // namespace detail

/// Parses and validates a configuration document. Geometric invariants that
/// need a mesh (crack length vs. distance to the boundary) are checked by
/// `Experiment`.
inline ExperimentConfig parse_config(const json& doc) {
  using detail::StrictObject;
  ExperimentConfig cfg;
  StrictObject root(doc, "config");

  {
    StrictObject m(root.at("material"), "config.material");
    cfg.lambda = m.number("lambda");
    cfg.mu = m.number("mu");
    m.finish();
    if (!(cfg.mu > 0.0)) throw ConfigError("config.material: inadmissible material, mu must be > 0");
    if (!(cfg.lambda + cfg.mu > 0.0)) throw ConfigError("config.material: inadmissible material, lambda + mu must be > 0");
  }
  {
    StrictObject g(root.at("geometry"), "config.geometry");
    cfg.geometry.kind = g.string("kind");
    if (cfg.geometry.kind == "disk") {
      cfg.geometry.shape = DiskShape{g.number_or("radius", 1.0)};
    } else if (cfg.geometry.kind == "ellipse") {
      cfg.geometry.shape = EllipseShape{g.number("semi_x"), g.number("semi_y")};
    } else if (cfg.geometry.kind == "fourier") {
      cfg.geometry.shape = FourierShape{g.number("r0"), g.numbers_or("cos"), g.numbers_or("sin")};
    } else {
      throw ConfigError("config.geometry.kind: expected disk, ellipse or fourier, got '" + cfg.geometry.kind + "'");
    }
    cfg.geometry.center = g.point_or("center", {});
    g.finish();
  }
  {
    StrictObject l(root.at("load"), "config.load");
    cfg.load.kind = l.string("kind");
    if (cfg.load.kind == "constant-stress") {
      const json& s = l.at("stress");
      if (!s.is_array() || s.size() != 2) throw ConfigError("config.load.stress: expected a 2x2 array");
      const Vec2 r0 = StrictObject::as_point(s[0], "config.load.stress[0]");
      const Vec2 r1 = StrictObject::as_point(s[1], "config.load.stress[1]");
      if (std::abs(r0.y - r1.x) > 1e-14 * (1.0 + std::abs(r0.y)))
        throw ConfigError("config.load.stress: stress tensor must be symmetric");
      cfg.load.stress = Matrix2::from_rows(r0.x, r0.y, r1.x, r1.y);
    } else if (cfg.load.kind == "fourier-traction") {
      cfg.load.fx = detail::parse_fourier_component(l.at("x"), "config.load.x");
      cfg.load.fy = detail::parse_fourier_component(l.at("y"), "config.load.y");
    } else {
      throw ConfigError("config.load.kind: expected constant-stress or fourier-traction, got '" + cfg.load.kind + "'");
    }
    l.finish();
  }
  {
    StrictObject c(root.at("crack"), "config.crack");
    cfg.crack.center = c.point("center");
    cfg.crack.angle_deg = c.number("angle_deg");
    cfg.crack.lengths = c.numbers("lengths");
    c.finish();
    if (cfg.crack.lengths.empty()) throw ConfigError("config.crack.lengths: at least one length is required");
    for (double len : cfg.crack.lengths)
      if (!(len > 0.0)) throw ConfigError("config.crack.lengths: crack lengths must be positive");
  }
  if (const json* d = root.find("discretization")) {
    StrictObject o(*d, "config.discretization");
    cfg.discretization.n_boundary = o.integer_or("n_boundary", cfg.discretization.n_boundary);
    cfg.discretization.n_cheb_modes = o.integer_or("n_cheb_modes", cfg.discretization.n_cheb_modes);
    cfg.discretization.tol = o.number_or("tol", cfg.discretization.tol);
    o.finish();
    if (cfg.discretization.n_boundary < 16 || cfg.discretization.n_boundary % 2 != 0)
      throw ConfigError("config.discretization.n_boundary: must be even and >= 16");
    if (cfg.discretization.n_cheb_modes < 1) throw ConfigError("config.discretization.n_cheb_modes: must be >= 1");
    if (!(cfg.discretization.tol > 0.0)) throw ConfigError("config.discretization.tol: must be positive");
  }
  if (const json* d = root.find("output")) {
    StrictObject o(*d, "config.output");
    cfg.output.directory = o.string_or("directory", cfg.output.directory);
    cfg.output.precision = o.integer_or("precision", cfg.output.precision);
    o.finish();
    if (cfg.output.precision < 1 || cfg.output.precision > 17)
      throw ConfigError("config.output.precision: must be in [1, 17]");
  }
  if (const json* d = root.find("td_map")) {
    StrictObject o(*d, "config.td_map");
    cfg.td_map.grid = o.integer_or("grid", cfg.td_map.grid);
    cfg.td_map.n_angles = o.integer_or("n_angles", cfg.td_map.n_angles);
    o.finish();
    if (cfg.td_map.grid < 1) throw ConfigError("config.td_map.grid: must be >= 1");
    if (cfg.td_map.n_angles < 1) throw ConfigError("config.td_map.n_angles: must be >= 1");
  }
  root.finish();
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Output formatting

/// Locale-independent shortest-or-fixed-precision rendering with '.' decimal.
inline std::string format_number(double v, int precision) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, r.ptr);
}

/// Shortest round-trip rendering, used in file names.
inline std::string format_label(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, int precision)
      : out_(path, std::ios::binary | std::ios::trunc), precision_(precision) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << format_number(v, precision_);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  int precision_;
};

inline const std::vector<std::string>& trace_header() {
  static const std::vector<std::string> h{"node_param", "x", "y", "u1", "u2"};
  return h;
}
inline const std::vector<std::string>& opening_header() {
  static const std::vector<std::string> h{"x1", "phi1", "phi2"};
  return h;
}
inline const std::vector<std::string>& convergence_header() {
  static const std::vector<std::string> h{"eps", "sup_w", "sup_mismatch", "energy_diff", "energy_formula",
                                          "energy_mismatch"};
  return h;
}
inline const std::vector<std::string>& td_map_header() {
  static const std::vector<std::string> h{"x", "y", "angle_deg", "K1", "K2", "td"};
  return h;
}
inline const std::vector<std::string>& td_min_header() {
  static const std::vector<std::string> h{"x", "y", "angle_deg", "K1", "K2", "td"};
  return h;
}
inline const std::vector<std::string>& energy_header() {
  static const std::vector<std::string> h{"eps", "energy_diff", "energy_formula", "energy_mismatch", "K1", "K2", "td"};
  return h;
}

// ---------------------------------------------------------------------------
// Experiment setup

/// Mesh, factorized operator and background solution built from a config.
struct Experiment {
  ExperimentConfig config;
  MeshPtr mesh;
  std::shared_ptr<const NeumannEvaluator> op;
  std::shared_ptr<const BackgroundSolution> background;
  std::vector<std::string> warnings;

  explicit Experiment(ExperimentConfig cfg, std::ostream* log = &std::cerr) : config(std::move(cfg)) {
    const LameParams mat = config.material();
    try {
      mesh = build_mesh(Curve(config.geometry.shape, 1.0, 0.0, config.geometry.center),
                        config.discretization.n_boundary);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config.geometry: ") + e.what());
    }
    op = std::make_shared<const NeumannEvaluator>(mesh, mat);

    BoundaryField g = build_traction();
    background = std::make_shared<const BackgroundSolution>(op->solve_background(g));
    for (const auto& w : warnings)
      if (log) *log << "warning: " << w << '\n';

    const Vec2 z = config.crack.center;
    if (!mesh->contains(z)) throw ConfigError("config.crack.center: crack center lies outside the domain");
    const double dist = mesh->distance_to_boundary(z);
    for (double len : config.crack.lengths)
      if (!(len < dist))
        throw ConfigError("config.crack.lengths: every crack length must be < dist(center, boundary) = " +
                          format_label(dist) + ", got " + format_label(len));
    if (dist < op->min_source_distance())
      throw ConfigError("config.crack.center: crack center is too close to the boundary for the discretization");
  }

  CrackSolveOptions solve_options() const {
    CrackSolveOptions o;
    o.n_modes = config.discretization.n_cheb_modes;
    o.tol = config.discretization.tol;
    return o;
  }

  CrackSegment crack(double length) const { return config.crack_template(length); }

 private:
  BoundaryField build_traction() {
    if (config.load.kind == "constant-stress") {
      const Matrix2 s = config.load.stress;
      return BoundaryField::sample(mesh, [&](const Vec2&, const Vec2& n) { return s * n; });
    }
    std::vector<Vec2> vals(mesh->size());
    for (int j = 0; j < mesh->size(); ++j) {
      const double t = mesh->param(j);
      vals[j] = {config.load.fx(t), config.load.fy(t)};
    }
    BoundaryField raw(mesh, vals);
    BoundaryField proj = project_onto_L2Psi(raw);
    const double change = (raw - proj).sup_norm();
    if (change > 1e-12 * std::max(1.0, raw.sup_norm()))
      warnings.push_back("fourier traction was projected onto the rigid-motion-orthogonal subspace (sup change " +
                         format_label(change) + ")");
    return proj;
  }
};

// ---------------------------------------------------------------------------
// Commands

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
  std::ostream* log = &std::cerr;
};

namespace detail {

inline void write_trace(const std::filesystem::path& path, const BoundaryField& u, int precision) {
  CsvWriter w(path, trace_header(), precision);
  const auto& m = u.mesh();
  for (int j = 0; j < m->size(); ++j)
    w.row({m->param(j), m->point(j).x, m->point(j).y, u[j].x, u[j].y});
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

inline json fit_to_json(const std::optional<SlopeFit>& f) {
  if (!f) return nullptr;
  return json{{"slope", f->slope}, {"intercept", f->intercept}, {"points_used", f->points_used}};
}

}  // namespace detail

inline constexpr int kOpeningSamples = 65;

/// Forward solves: background trace, cracked traces and crack openings per length.
inline void cmd_solve(const Experiment& ex, const RunOptions& run) {
  std::filesystem::create_directories(run.out_dir);
  const int prec = ex.config.output.precision;
  detail::write_trace(run.out_dir / "trace_u0.csv", ex.background->trace, prec);

  const auto& lengths = ex.config.crack.lengths;
  const auto opts = ex.solve_options();
  const auto sols = parallel_map<std::shared_ptr<CrackedSolution>>(lengths.size(), run.threads, [&](std::size_t i) {
    return std::make_shared<CrackedSolution>(solve_cracked(ex.op, ex.background, ex.crack(lengths[i]), opts));
  });

  json cracks = json::array();
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto& sol = *sols[i];
    const std::string label = format_label(lengths[i]);
    detail::write_trace(run.out_dir / ("trace_ueps_" + label + ".csv"), sol.u_eps_trace(), prec);
    CsvWriter w(run.out_dir / ("crack_opening_" + label + ".csv"), opening_header(), prec);
    const double half = 0.5 * lengths[i];
    for (int k = 0; k < kOpeningSamples; ++k) {
      const double x1 = k == kOpeningSamples - 1 ? half : -half + 2.0 * half * k / (kOpeningSamples - 1);
      const Vec2 phi = crack_opening(sol, x1);
      w.row({x1, phi.x, phi.y});
    }
    const auto& d = sol.diagnostics;
    cracks.push_back({{"length", lengths[i]},
                      {"iterations", d.iterations},
                      {"update_norms", d.update_norms},
                      {"boundary_residual", d.boundary_residual},
                      {"crack_residual", d.crack_residual},
                      {"used_direct_fallback", d.used_direct_fallback}});
  }
  detail::write_json(run.out_dir / "diagnostics.json",
                     json{{"n_boundary", ex.mesh->size()},
                          {"background_residual", ex.background->residual},
                          {"warnings", ex.warnings},
                          {"cracks", cracks}});
}

/// Sweep over crack lengths comparing the full solve with the leading-order formulas.
inline std::vector<SweepPoint> cmd_convergence(const Experiment& ex, const RunOptions& run) {
  const auto& lengths = ex.config.crack.lengths;
  if (lengths.size() < 3) throw ConfigError("config.crack.lengths: a convergence study needs at least 3 lengths");
  std::filesystem::create_directories(run.out_dir);
  const SweepContext ctx(ex.op, ex.background, ex.crack(lengths.front()));
  const auto pts = run_sweep(ctx, lengths, ex.solve_options(), run.threads);

  CsvWriter w(run.out_dir / "convergence.csv", convergence_header(), ex.config.output.precision);
  std::vector<double> eps, sup_w, sup_mis, en_mis;
  for (const auto& p : pts) {
    w.row({p.eps, p.sup_w, p.sup_mismatch, p.energy_diff, p.energy_formula, p.energy_mismatch});
    eps.push_back(p.eps);
    sup_w.push_back(p.sup_w);
    sup_mis.push_back(p.sup_mismatch);
    en_mis.push_back(p.energy_mismatch);
  }
  // Values within 10x the solver tolerance carry no asymptotic information.
  const double floor = 10.0 * ex.config.discretization.tol;
  detail::write_json(run.out_dir / "slopes.json",
                     json{{"sup_w", detail::fit_to_json(fit_loglog_slope(eps, sup_w, floor))},
                          {"sup_mismatch", detail::fit_to_json(fit_loglog_slope(eps, sup_mis, floor))},
                          {"energy_mismatch", detail::fit_to_json(fit_loglog_slope(eps, en_mis, floor))},
                          {"noise_floor", floor}});
  return pts;
}

struct TdSample {
  Vec2 point{};
  double angle_deg = 0.0;
  StressIntensity sif{};
  double td = 0.0;
};

struct TdPointResult {
  bool skipped = true;
  Vec2 point{};
  std::vector<TdSample> samples;
  std::size_t best = 0;
};

/// Scan of the closed-form topological derivative over e_perp angles at one point.
inline TdPointResult td_scan(const Experiment& ex, const Vec2& p, int n_angles) {
  TdPointResult r;
  r.point = p;
  r.skipped = false;
  const Matrix2 s = ex.background->evaluator.stress(p);
  const LameParams mat = ex.config.material();
  for (int a = 0; a < n_angles; ++a) {
    const double deg = 180.0 * a / n_angles;
    const double rad = deg * pi / 180.0;
    const CrackSegment c(p, rad - 0.5 * pi, 1.0);
    const StressIntensity k = stress_intensity(s, c);
    r.samples.push_back({p, deg, k, topological_derivative(k, mat)});
  }
  // Ties resolve to the smallest angle.
  for (std::size_t i = 1; i < r.samples.size(); ++i) {
    const double cur = r.samples[i].td, best = r.samples[r.best].td;
    if (cur < best - 1e-13 * std::abs(best)) r.best = i;
  }
  return r;
}

/// n x n lattice over the domain's bounding box; cell-centred so no point lies on the box edge.
inline std::vector<Vec2> td_lattice(const BoundaryMesh& mesh, int n) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : mesh.points()) {
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  }
  std::vector<Vec2> out;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.push_back({x0 + (i + 0.5) * (x1 - x0) / n, y0 + (j + 0.5) * (y1 - y0) / n});
  return out;
}

inline std::vector<TdPointResult> cmd_td_map(const Experiment& ex, const RunOptions& run) {
  std::filesystem::create_directories(run.out_dir);
  const auto lattice = td_lattice(*ex.mesh, ex.config.td_map.grid);
  const double margin = ex.op->min_source_distance();
  auto results = parallel_map<TdPointResult>(lattice.size(), run.threads, [&](std::size_t i) {
    const Vec2 p = lattice[i];
    if (!ex.mesh->contains(p) || ex.mesh->distance_to_boundary(p) < margin) {
      TdPointResult r;
      r.point = p;
      return r;
    }
    return td_scan(ex, p, ex.config.td_map.n_angles);
  });

  const int prec = ex.config.output.precision;
  CsvWriter all(run.out_dir / "td_map.csv", td_map_header(), prec);
  CsvWriter mins(run.out_dir / "td_map_min.csv", td_min_header(), prec);
  for (const auto& r : results) {
    if (r.skipped) {
      if (run.log)
        *run.log << "td-map: skipped lattice point (" << format_label(r.point.x) << ", " << format_label(r.point.y)
                 << "): outside the domain or closer than " << format_label(margin) << " to the boundary\n";
      continue;
    }
    for (const auto& s : r.samples) all.row({s.point.x, s.point.y, s.angle_deg, s.sif.k1, s.sif.k2, s.td});
    const auto& b = r.samples[r.best];
    mins.row({b.point.x, b.point.y, b.angle_deg, b.sif.k1, b.sif.k2, b.td});
  }
  return results;
}

/// Energy change per crack length against the closed-form expansion.
inline std::vector<SweepPoint> cmd_energy(const Experiment& ex, const RunOptions& run) {
  std::filesystem::create_directories(run.out_dir);
  const auto& lengths = ex.config.crack.lengths;
  const SweepContext ctx(ex.op, ex.background, ex.crack(lengths.front()));
  const auto pts = run_sweep(ctx, lengths, ex.solve_options(), run.threads);
  const double td = topological_derivative(ctx.sif, ex.config.material());
  CsvWriter w(run.out_dir / "energy.csv", energy_header(), ex.config.output.precision);
  for (const auto& p : pts)
    w.row({p.eps, p.energy_diff, p.energy_formula, p.energy_mismatch, ctx.sif.k1, ctx.sif.k2, td});
  return pts;
}

// ---------------------------------------------------------------------------
// Entry point shared by the executable and the tests

/// Runs one subcommand and maps failures onto exit codes.
inline int run_command(const std::string& command, const std::filesystem::path& config_path,
                       const std::optional<std::filesystem::path>& out_override, int threads,
                       std::ostream& err = std::cerr) {
  try {
    if (threads < 1) throw ConfigError("--threads: must be >= 1");
    ExperimentConfig cfg = load_config(config_path);
    RunOptions run;
    run.out_dir = out_override ? *out_override : std::filesystem::path(cfg.output.directory);
    run.threads = threads;
    run.log = &err;
    const Experiment ex(std::move(cfg), &err);
    if (command == "solve")
      cmd_solve(ex, run);
    else if (command == "convergence")
      cmd_convergence(ex, run);
    else if (command == "td-map")
      cmd_td_map(ex, run);
    else if (command == "energy")
      cmd_energy(ex, run);
    else
      throw ConfigError("unknown command '" + command + "'");
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace crackbem::harness
