#include "dstft/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "dstft/fixtures.hpp"
#include "dstft/io.hpp"
#include "dstft/parallel.hpp"
#include "dstft/synthesis.hpp"
#include "dstft/wavefront.hpp"

namespace dstft {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;
constexpr double kDeg = std::numbers::pi / 180.0;

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// ---------------------------------------------------------------- config

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::vector<double> vec_or_scalar(const json& j, const char* key, std::size_t dim, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(dim, v.get<double>());
  auto out = get<std::vector<double>>(j, key, where);
  if (out.size() != dim) throw ConfigError(where + "." + key + ": expected " + std::to_string(dim) + " entries");
  return out;
}

Grid parse_grid(const json& j, const std::string& where) {
  check_keys(j, {"counts", "spacing", "origin"}, where);
  auto counts = get<std::vector<std::size_t>>(j, "counts", where);
  auto spacing = vec_or_scalar(j, "spacing", counts.size(), where);
  if (j.contains("origin")) return Grid(vec_or_scalar(j, "origin", counts.size(), where), spacing, counts);
  return Grid::centered(counts, spacing);
}

struct Sheet {
  std::vector<double> u;  // unit normal
  double c = 0.0;
};

std::vector<double> unit_vector(std::vector<double> u, const std::string& where) {
  double n = 0.0;
  for (double x : u) n += x * x;
  n = std::sqrt(n);
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError(where + ": direction must be nonzero");
  for (double& x : u) x /= n;
  return u;
}

void check_sheet_meets_grid(const Grid& g, const Sheet& s, const std::string& where) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t a = 0; a < g.dim(); ++a) {
    double p = s.u[a] * g.origin()[a], q = s.u[a] * g.upper(a);
    lo += std::min(p, q);
    hi += std::max(p, q);
  }
  if (s.c < lo || s.c > hi) throw InputError(where + ": the sheet u.t = c does not meet the grid");
}

void check_point_in_grid(const Grid& g, const std::vector<double>& p, const std::string& where) {
  if (p.size() != g.dim()) throw InputError(where + ": wrong dimension");
  for (std::size_t a = 0; a < g.dim(); ++a)
    if (p[a] < g.origin()[a] || p[a] > g.upper(a)) throw InputError(where + ": point lies outside the grid");
}

struct Generated {
  Signal signal;
  std::vector<Sheet> sheets;
};

Generated make_fixture(const Grid& g, const json& j, const std::string& where) {
  std::string kind = get<std::string>(j, "kind", where);
  std::size_t n = g.dim();
  if (kind == "gaussian") {
    check_keys(j, {"kind", "center", "width"}, where);
    auto c = j.contains("center") ? vec_or_scalar(j, "center", n, where) : std::vector<double>(n, 0.0);
    check_point_in_grid(g, c, where + ".center");
    return {fixtures::gaussian(g, c, get_or<double>(j, "width", 1.0, where)), {}};
  }
  if (kind == "heaviside_sheet" || kind == "delta_sheet") {
    if (kind == "heaviside_sheet")
      check_keys(j, {"kind", "u", "c"}, where);
    else
      check_keys(j, {"kind", "u", "c", "width"}, where);
    auto u = get<std::vector<double>>(j, "u", where);
    if (u.size() != n) throw InputError(where + ".u: wrong dimension");
    Sheet s{unit_vector(u, where + ".u"), get_or<double>(j, "c", 0.0, where)};
    check_sheet_meets_grid(g, s, where);
    Signal f = kind == "heaviside_sheet"
                   ? fixtures::heaviside_sheet(g, s.u, s.c)
                   : fixtures::delta_sheet(g, s.u, s.c, get_or<double>(j, "width", 0.05, where));
    return {f, {s}};
  }
  if (kind == "zero") {
    check_keys(j, {"kind"}, where);
    return {Signal(g), {}};
  }
  if (kind == "plane_wave") {
    check_keys(j, {"kind", "xi0"}, where);
    auto xi0 = vec_or_scalar(j, "xi0", n, where);
    for (std::size_t a = 0; a < n; ++a)
      if (std::abs(xi0[a]) > 0.5 / g.spacing()[a])
        throw InputError(where + ".xi0: frequency beyond the Nyquist limit of the grid");
    return {fixtures::plane_wave(g, xi0), {}};
  }
  if (kind == "random_bandlimited") {
    check_keys(j, {"kind", "seed", "bandwidth"}, where);
    auto seed = get<std::uint64_t>(j, "seed", where);
    return {fixtures::random_bandlimited(g, seed, get<double>(j, "bandwidth", where)), {}};
  }
  if (kind == "sum") {
    check_keys(j, {"kind", "terms"}, where);
    const json& terms = j.at("terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError(where + ".terms: expected a non-empty array");
    Generated acc = make_fixture(g, terms[0], where + ".terms[0]");
    for (std::size_t i = 1; i < terms.size(); ++i) {
      Generated t = make_fixture(g, terms[i], where + ".terms[" + std::to_string(i) + "]");
      acc.signal = fixtures::sum(acc.signal, t.signal);
      acc.sheets.insert(acc.sheets.end(), t.sheets.begin(), t.sheets.end());
    }
    return acc;
  }
  if (kind == "modulate") {
    check_keys(j, {"kind", "xi0", "of"}, where);
    Generated inner = make_fixture(g, j.at("of"), where + ".of");
    auto xi0 = vec_or_scalar(j, "xi0", n, where);
    inner.signal = fixtures::modulate(inner.signal, xi0);
    return inner;
  }
  throw InputError(where + ": unknown fixture kind '" + kind + "'");
}

Window parse_window_unshifted(const json& j, const Grid& wgrid, const std::string& where) {
  std::string kind = get<std::string>(j, "kind", where);
  if (kind == "gaussian") {
    check_keys(j, {"kind", "sigma", "shift"}, where);
    return gaussian_window(wgrid, vec_or_scalar(j, "sigma", wgrid.dim(), where));
  }
  if (kind == "gevrey_bump") {
    check_keys(j, {"kind", "radius", "alpha", "shift"}, where);
    return gevrey_bump(wgrid, get<double>(j, "radius", where), get<double>(j, "alpha", where));
  }
  if (kind == "custom") {
    check_keys(j, {"kind", "path", "interpolation", "shift"}, where);
    Signal s = io::read_signal(get<std::string>(j, "path", where));
    if (s.grid.dim() != wgrid.dim()) throw InputError(where + ": custom window has the wrong dimension");
    std::string ip = get_or<std::string>(j, "interpolation", "trigonometric", where);
    if (ip != "trigonometric" && ip != "linear") throw ConfigError(where + ".interpolation: unknown value '" + ip + "'");
    return custom_window(s, ip == "linear" ? Interpolation::Linear : Interpolation::Trigonometric);
  }
  throw InputError(where + ": unknown window kind '" + kind + "'");
}

Window parse_window(const json& j, const Grid& wgrid, const std::string& where) {
  Window w = parse_window_unshifted(j, wgrid, where);
  if (!j.contains("shift")) return w;
  return shifted(w, vec_or_scalar(j, "shift", wgrid.dim(), where));
}

DirectionFrame parse_frame(const json& j, std::size_t n) {
  check_keys(j, {"u"}, "frame");
  auto u = get<Matrix>(j, "u", "frame");
  DirectionFrame f = build_frame(u);
  if (f.n != n) throw InputError("frame: direction length " + std::to_string(f.n) + " does not match the signal dimension " + std::to_string(n));
  return f;
}

struct Options {
  std::string command;
  std::string config_path;
  unsigned threads = 0;
  bool oracle = false;
  bool strict_window = false;
  std::string fault;
};

struct Run {
  const Options& opt;
  json cfg;
  std::ostream& out;
  std::ostream& err;

  std::string path(const char* key) const { return get<std::string>(cfg, key, "config"); }
  bool has(const char* key) const { return cfg.contains(key); }
  bool overwrite() const { return get_or<bool>(cfg, "overwrite", false, "config"); }
  std::size_t oracle_cap() const {
    return get_or<std::size_t>(cfg, "oracle_cap", kDefaultOracleCap, "config");
  }
};

void ensure_distinct(const Run& r, const std::string& output, std::initializer_list<std::string> inputs) {
  if (r.overwrite()) return;
  auto canon = [](const std::string& p) { return fs::weakly_canonical(fs::path(p)); };
  for (const auto& in : inputs)
    if (!in.empty() && canon(in) == canon(output))
      throw ConfigError("output path '" + output + "' equals an input path (set \"overwrite\": true to allow)");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw InputError("cannot open '" + path + "' for writing");
  o << text;
  if (!o) throw InputError("write to '" + path + "' failed");
}

json sheets_to_json(const std::vector<Sheet>& sheets) {
  json a = json::array();
  for (const auto& s : sheets) {
    json d = json::array();
    json neg = s.u;
    for (auto& x : neg) x = -x.get<double>();
    d.push_back(s.u);
    d.push_back(neg);
    a.push_back({{"u", s.u}, {"c", s.c}, {"directions", d}});
  }
  return a;
}

json grid_to_json(const Grid& g) {
  return {{"counts", g.counts()}, {"spacing", g.spacing()}, {"origin", g.origin()}};
}

std::string sidecar_path(const std::string& signal_path) { return signal_path + ".json"; }

// Signal from "signal" (file) or an inline "fixture" with "grid".
Generated load_signal(const Run& r) {
  if (r.has("signal") && r.has("fixture")) throw ConfigError("config: give either 'signal' or 'fixture', not both");
  if (r.has("signal")) {
    std::string p = r.path("signal");
    Generated g{io::read_signal(p), {}};
    if (fs::exists(sidecar_path(p))) {
      std::ifstream in(sidecar_path(p));
      json side = json::parse(in, nullptr, false);
      if (side.is_discarded()) throw InputError("sidecar '" + sidecar_path(p) + "' is not valid JSON");
      for (const auto& s : side.value("singular_sheets", json::array()))
        g.sheets.push_back({s.at("u").get<std::vector<double>>(), s.at("c").get<double>()});
    }
    return g;
  }
  if (r.has("fixture")) {
    if (!r.has("grid")) throw ConfigError("config: an inline fixture needs 'grid'");
    return make_fixture(parse_grid(r.cfg.at("grid"), "grid"), r.cfg.at("fixture"), "fixture");
  }
  throw ConfigError("config: missing 'signal' (or inline 'fixture')");
}

Grid y_grid_for(const Run& r, const Grid& sig, std::size_t k) {
  if (r.has("y_grid")) {
    Grid y = parse_grid(r.cfg.at("y_grid"), "y_grid");
    if (y.dim() != k) throw InputError("y_grid: dimension must equal the number of directions");
    return y;
  }
  return default_y_grid(sig, k);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json cert_json(const PairingCert& c) {
  return {{"value", {c.value.real(), c.value.imag()}},
          {"magnitude", c.magnitude},
          {"threshold", c.threshold},
          {"admissible", c.admissible}};
}

void warn(const Run& r, const std::string& msg) { r.err << "warning: " << msg << "\n"; }

// ---------------------------------------------------------------- commands

int cmd_gen(const Run& r) {
  check_keys(r.cfg, {"schema_version", "grid", "fixture", "output", "overwrite"}, "config");
  Grid g = parse_grid(get<json>(r.cfg, "grid", "config"), "grid");
  Generated gen = make_fixture(g, get<json>(r.cfg, "fixture", "config"), "fixture");
  std::string out = r.path("output");
  double bm = boundary_mass_fraction(gen.signal);
  if (bm > kBoundaryMassThreshold) {
    std::ostringstream os;
    os << "boundary mass fraction " << bm << " exceeds " << kBoundaryMassThreshold
       << "; the signal does not decay inside the grid";
    warn(r, os.str());
  }
  io::write_signal(out, gen.signal);
  json side = {{"schema_version", kSchemaVersion},
               {"fixture", r.cfg.at("fixture")},
               {"grid", grid_to_json(g)},
               {"boundary_mass_fraction", bm},
               {"boundary_mass_ok", bm <= kBoundaryMassThreshold},
               {"singular_sheets", sheets_to_json(gen.sheets)}};
  write_text(sidecar_path(out), side.dump(2) + "\n");
  r.out << "wrote " << out << " (" << g.describe() << ")\n";
  return kExitOk;
}

int cmd_analyze(const Run& r) {
  check_keys(r.cfg, {"schema_version", "signal", "fixture", "grid", "window", "frame", "y_grid", "output", "csv",
                     "oracle_cap", "overwrite", "threads"},
             "config");
  Generated in = load_signal(r);
  const Signal& f = in.signal;
  DirectionFrame fr = parse_frame(get<json>(r.cfg, "frame", "config"), f.grid.dim());
  Grid y = y_grid_for(r, f.grid, fr.k);
  Window g = parse_window(get<json>(r.cfg, "window", "config"), default_y_grid(f.grid, fr.k), "window");
  std::string out = r.path("output");
  ensure_distinct(r, out, {r.has("signal") ? r.path("signal") : ""});
  auto t0 = std::chrono::steady_clock::now();
  DstftField F = r.opt.oracle ? dstft_direct(f, g, fr, y, r.oracle_cap()) : dstft_fast(f, g, fr, y);
  double dt = seconds_since(t0);
  io::write_field(out, F);
  if (r.has("csv")) io::write_magnitude_slice_csv(r.path("csv"), F, y.size() / 2);
  r.out << json{{"output", out},
                {"y_points", y.size()},
                {"xi_points", F.xi_grid.size()},
                {"path", r.opt.oracle ? "direct" : "fast"},
                {"seconds", dt}}
               .dump()
        << "\n";
  return kExitOk;
}

int cmd_synthesize(const Run& r) {
  check_keys(r.cfg, {"schema_version", "field", "window", "synthesis_window", "output", "oracle_cap", "overwrite",
                     "threads"},
             "config");
  std::string fpath = r.path("field");
  DstftField F = io::read_field(fpath);
  Grid out_grid = F.source_grid();
  Grid wgrid = default_y_grid(out_grid, F.frame.k);
  bool both = r.has("window") && r.has("synthesis_window");
  const char* key = r.has("synthesis_window") ? "synthesis_window" : "window";
  Window phi = parse_window(get<json>(r.cfg, key, "config"), wgrid, key);
  std::string out = r.path("output");
  ensure_distinct(r, out, {fpath});
  Signal s = r.opt.oracle ? dso_direct(F, phi, F.frame, out_grid, r.oracle_cap())
                          : dso_fast(F, phi, F.frame, out_grid);
  json info = {{"output", out}};
  if (both) {
    Window g = parse_window(r.cfg.at("window"), wgrid, "window");
    PairingCert c = pairing_check(g, phi);
    if (!c.admissible) {
      r.err << json{{"error", "window pair is not admissible"}, {"pairing", cert_json(c)}}.dump(2) << "\n";
      return kExitInput;
    }
    cd scale = 1.0 / std::conj(c.value);
    for (auto& v : s.values) v *= scale;
    info["pairing"] = cert_json(c);
  }
  io::write_signal(out, s);
  r.out << info.dump() << "\n";
  return kExitOk;
}

int cmd_roundtrip(const Run& r) {
  check_keys(r.cfg, {"schema_version", "signal", "fixture", "grid", "window", "synthesis_window", "frame", "y_grid",
                     "tolerance", "report", "overwrite", "threads"},
             "config");
  Generated in = load_signal(r);
  const Signal& f = in.signal;
  DirectionFrame fr = parse_frame(get<json>(r.cfg, "frame", "config"), f.grid.dim());
  Grid y = y_grid_for(r, f.grid, fr.k);
  Grid wgrid = default_y_grid(f.grid, fr.k);
  Window g = parse_window(get<json>(r.cfg, "window", "config"), wgrid, "window");
  Window phi = r.has("synthesis_window") ? parse_window(r.cfg.at("synthesis_window"), wgrid, "synthesis_window") : g;
  double tol = get_or<double>(r.cfg, "tolerance", 1e-3, "config");
  if (!(tol >= 0.0)) throw ConfigError("config.tolerance: must be non-negative");
  if (r.has("report")) ensure_distinct(r, r.path("report"), {r.has("signal") ? r.path("signal") : ""});

  PairingCert cert = pairing_check(g, phi);
  if (!cert.admissible) {
    json rep = {{"error", "window pair is not admissible"}, {"pairing", cert_json(cert)}};
    r.err << rep.dump(2) << "\n";
    if (r.has("report")) write_text(r.path("report"), rep.dump(2) + "\n");
    return kExitInput;
  }
  auto t0 = std::chrono::steady_clock::now();
  DstftField F = dstft_fast(f, g, fr, y);
  double t_analyze = seconds_since(t0);
  auto t1 = std::chrono::steady_clock::now();
  Signal rec = dso_fast(F, phi, fr, f.grid);
  cd scale = 1.0 / std::conj(cert.value);
  for (auto& v : rec.values) v *= scale;
  double t_synth = seconds_since(t1);

  double num = 0.0, den = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    double e = std::abs(rec.values[i] - f.values[i]);
    num += e * e;
    den += std::norm(f.values[i]);
    mx = std::max(mx, e);
  }
  double vol = f.grid.cell_volume();
  bool zero_signal = den == 0.0;
  double err = zero_signal ? std::sqrt(num * vol) : std::sqrt(num / den);
  bool pass = err <= tol;
  json rep = {{"rel_l2_error", err},
              {"error_kind", zero_signal ? "absolute" : "relative"},
              {"max_abs_error", mx},
              {"pairing_value", {cert.value.real(), cert.value.imag()}},
              {"pairing", cert_json(cert)},
              {"sampling_quality", sampling_quality(f, g, phi, fr, y)},
              {"tolerance", tol},
              {"passed", pass}};
  if (r.has("report")) write_text(r.path("report"), rep.dump(2) + "\n");
  rep["timings"] = {{"analyze_s", t_analyze}, {"synthesize_s", t_synth}, {"total_s", seconds_since(t0)}};
  r.out << rep.dump(2) << "\n";
  return pass ? kExitOk : kExitFail;
}

// Distance in y-space from y0 to the image of the sheet under t -> U t, or 0
// when that image is all of R^k.
double sheet_distance(const DirectionFrame& fr, const Sheet& s, std::span<const double> y0) {
  Eigen::MatrixXd At(fr.n, fr.k);
  for (std::size_t i = 0; i < fr.k; ++i)
    for (std::size_t j = 0; j < fr.n; ++j) At(j, i) = fr.u[i][j];
  Eigen::VectorXd us = Eigen::Map<const Eigen::VectorXd>(s.u.data(), fr.n);
  Eigen::VectorXd w = At.colPivHouseholderQr().solve(us);
  if ((At * w - us).norm() > 1e-9 || w.norm() == 0.0) return 0.0;
  double d = -s.c;
  for (std::size_t i = 0; i < fr.k; ++i) d += w(i) * y0[i];
  return std::abs(d) / w.norm();
}

bool cone_hits(const ConeSpec& c, const std::vector<double>& u) {
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d += c.center[i] * u[i];
  return std::acos(std::min(1.0, std::abs(d))) <= c.half_angle + 1e-12;
}

json verdict(const WavefrontReport& rep, const DirectionFrame& fr, const std::vector<Sheet>& sheets, double reach) {
  std::size_t expect_sing = 0, dont_care = 0, detected = 0;
  json mismatches = json::array();
  for (const auto& e : rep.entries) {
    bool want_sing = false, want_reg = true;
    for (const auto& s : sheets) {
      double d = sheet_distance(fr, s, e.cell.center);
      bool hit = cone_hits(e.cone, s.u);
      if (d <= e.cell.radius && hit) want_sing = true;
      if (hit && d <= e.cell.radius + reach) want_reg = false;
    }
    if (!e.regular) ++detected;
    std::string expected = want_sing ? "singular" : want_reg ? "regular" : "any";
    if (expected == "singular") ++expect_sing;
    if (expected == "any") {
      ++dont_care;
      continue;
    }
    if (e.regular == want_sing)
      mismatches.push_back({{"cell_center", e.cell.center},
                            {"cone_center", e.cone.center},
                            {"expected", expected},
                            {"N_hat", std::isfinite(e.fit.N_hat) ? json(e.fit.N_hat) : json(nullptr)}});
  }
  return {{"verdict", mismatches.empty() ? "PASS" : "FAIL"},
          {"expected_singular", expect_sing},
          {"detected_singular", detected},
          {"dont_care", dont_care},
          {"mismatches", mismatches}};
}

std::vector<ConeSpec> parse_cones(const json& j, const Grid& xi_grid) {
  check_keys(j, {"count", "centers", "half_angle_deg", "r_min"}, "cones");
  double half = get<double>(j, "half_angle_deg", "cones") * kDeg;
  double rmin = get_or<double>(j, "r_min", default_r_min(xi_grid), "cones");
  std::size_t n = xi_grid.dim();
  if (j.contains("centers")) {
    if (j.contains("count")) throw ConfigError("cones: give either 'count' or 'centers'");
    std::vector<ConeSpec> out;
    for (const auto& c : get<Matrix>(j, "centers", "cones")) {
      if (c.size() != n) throw InputError("cones: center has the wrong dimension");
      out.push_back(make_cone(c, half, rmin));
    }
    if (out.empty()) throw InputError("cones: empty dictionary");
    return out;
  }
  auto count = get<std::size_t>(j, "count", "cones");
  if (n == 1) {
    if (count != 2) throw InputError("cones: a one-dimensional dictionary has exactly two cones");
    return {make_cone({1.0}, half, rmin), make_cone({-1.0}, half, rmin)};
  }
  if (n != 2) throw InputError("cones: 'count' only generates dictionaries in one or two dimensions; give 'centers'");
  if (count == 0) throw InputError("cones: count must be positive");
  return cone_dictionary_2d(count, half, rmin);
}

std::vector<BallSpec> parse_cells(const json& j, std::size_t k) {
  check_keys(j, {"centers", "radius"}, "cells");
  double rad = get<double>(j, "radius", "cells");
  if (!(rad >= 0.0)) throw InputError("cells: radius must be non-negative");
  std::vector<BallSpec> out;
  for (const auto& c : get<Matrix>(j, "centers", "cells")) {
    if (c.size() != k) throw InputError("cells: center dimension must equal the number of directions");
    out.push_back({c, rad});
  }
  if (out.empty()) throw InputError("cells: no centers");
  return out;
}

int cmd_wavefront(const Run& r) {
  check_keys(r.cfg, {"schema_version", "signal", "fixture", "grid", "window", "frame", "alpha", "threshold_N",
                     "residual_cap", "fit", "cones", "cells", "report", "csv", "verdict", "strict_window",
                     "overwrite", "threads"},
             "config");
  Generated in = load_signal(r);
  const Signal& f = in.signal;
  DirectionFrame fr = parse_frame(get<json>(r.cfg, "frame", "config"), f.grid.dim());
  Window g = parse_window(get<json>(r.cfg, "window", "config"), default_y_grid(f.grid, fr.k), "window");
  double alpha = get<double>(r.cfg, "alpha", "config");
  double thr = get_or<double>(r.cfg, "threshold_N", 1.0, "config");
  ScanOptions so;
  so.strict_window = r.opt.strict_window || get_or<bool>(r.cfg, "strict_window", false, "config");
  so.fit.residual_cap = get_or<double>(r.cfg, "residual_cap", so.fit.residual_cap, "config");
  if (r.has("fit")) {
    const json& fj = r.cfg.at("fit");
    check_keys(fj, {"noise_rel", "nyquist_fraction", "shells_per_octave"}, "fit");
    so.fit.noise_rel = get_or<double>(fj, "noise_rel", so.fit.noise_rel, "fit");
    so.fit.nyquist_fraction = get_or<double>(fj, "nyquist_fraction", so.fit.nyquist_fraction, "fit");
    so.fit.shells_per_octave = get_or<int>(fj, "shells_per_octave", so.fit.shells_per_octave, "fit");
  }
  auto cones = parse_cones(get<json>(r.cfg, "cones", "config"), f.grid.dual());
  auto cells = parse_cells(get<json>(r.cfg, "cells", "config"), fr.k);
  std::string report_path = r.path("report");
  std::string in_path = r.has("signal") ? r.path("signal") : "";
  ensure_distinct(r, report_path, {in_path});

  auto t0 = std::chrono::steady_clock::now();
  WavefrontReport rep = wavefront_scan(f, g, fr, alpha, cells, cones, thr, so);
  double dt = seconds_since(t0);
  for (const auto& w : rep.warnings) warn(r, w);
  write_text(report_path, report_to_json(rep) + "\n");
  if (r.has("csv")) {
    ensure_distinct(r, r.path("csv"), {in_path});
    write_text(r.path("csv"), report_to_csv(rep));
  }

  std::size_t singular = 0;
  for (const auto& e : rep.entries) singular += e.regular ? 0 : 1;
  json summary = {{"report", report_path}, {"entries", rep.entries.size()}, {"singular", singular}, {"seconds", dt}};

  bool have_truth = r.has("fixture") || (!in_path.empty() && fs::exists(sidecar_path(in_path)));
  int code = kExitOk;
  if (have_truth) {
    double reach = g.support_radius > 0.0 ? g.support_radius : 0.0;
    if (reach == 0.0)
      for (double s : g.sigma) reach = std::max(reach, 4.0 * s);
    json v = verdict(rep, fr, in.sheets, reach);
    std::string vpath = r.has("verdict") ? r.path("verdict") : report_path + ".verdict.json";
    write_text(vpath, v.dump(2) + "\n");
    summary["verdict"] = v["verdict"];
    summary["verdict_path"] = vpath;
    if (v["verdict"] != "PASS") code = kExitFail;
  }
  r.out << summary.dump() << "\n";
  return code;
}

int cmd_selftest(const Run& r) {
  SelftestOptions so;
  if (!r.cfg.is_null()) {
    check_keys(r.cfg, {"schema_version", "oracle_cap", "threads"}, "config");
    so.oracle_cap = r.oracle_cap();
  }
  so.inject_dft_scale_fault = r.opt.fault == "dft-scale";
  return run_selftest(so, r.out, r.err);
}

json load_config(const std::string& path, bool required) {
  if (path.empty()) {
    if (required) throw ConfigError("--config is required for this command");
    return json();
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  if (!j.contains("schema_version")) throw ConfigError("config: missing 'schema_version'");
  if (get<int>(j, "schema_version", "config") != kSchemaVersion)
    throw ConfigError("config: unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Directional short-time Fourier transform toolkit", "dstft"};
  app.add_option("command", opt.command, "gen | analyze | synthesize | roundtrip | wavefront | selftest")
      ->required()
      ->check(CLI::IsMember({"gen", "analyze", "synthesize", "roundtrip", "wavefront", "selftest"}));
  app.add_option("--config", opt.config_path, "JSON run configuration");
  app.add_option("--threads", opt.threads, "worker threads (0 = hardware)");
  app.add_flag("--oracle", opt.oracle, "use the direct quadrature paths");
  app.add_flag("--strict-window", opt.strict_window, "reject non-bump windows in wavefront scans");
  app.add_option("--inject-fault", opt.fault)->group("")->check(CLI::IsMember({"dft-scale"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  unsigned prev_threads = thread_count();
  struct Restore {
    unsigned n;
    ~Restore() {
      set_thread_count(n);
      testing_hooks::set_dft_scale_fault(1.0);
    }
  } restore{prev_threads};

  try {
    Run r{opt, load_config(opt.config_path, opt.command != "selftest"), out, err};
    unsigned threads = opt.threads;
    if (threads == 0 && r.cfg.is_object()) threads = get_or<unsigned>(r.cfg, "threads", 0, "config");
    if (threads > 0) set_thread_count(threads);
    if (opt.command == "gen") return cmd_gen(r);
    if (opt.command == "analyze") return cmd_analyze(r);
    if (opt.command == "synthesize") return cmd_synthesize(r);
    if (opt.command == "roundtrip") return cmd_roundtrip(r);
    if (opt.command == "wavefront") return cmd_wavefront(r);
    return cmd_selftest(r);
  } catch (const PairingError& e) {
    err << json{{"error", e.what()}, {"pairing", cert_json(e.cert())}}.dump(2) << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace dstft
