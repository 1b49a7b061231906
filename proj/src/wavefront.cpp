#include "dstft/wavefront.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "dstft/parallel.hpp"

namespace dstft {
namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double angle_between(std::span<const double> a, std::span<const double> unit_b) {
  double na = norm2(a);
  if (na == 0.0) return std::numbers::pi;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * unit_b[i];
  return std::acos(std::clamp(dot / na, -1.0, 1.0));
}

struct Shell {
  double sup = -1.0;
  double radius = 0.0;
};

DecayFit fit_slices(const Grid& xg, const std::vector<std::span<const cd>>& slices,
                    const ConeSpec& cone, double alpha, const FitOptions& opt) {
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw InputError("decay_fit: alpha must be greater than 1");
  if (cone.center.size() != xg.dim())
    throw InputError("decay_fit: cone dimension does not match the frequency grid");
  if (slices.empty()) throw InputError("decay_fit: the ball contains no y lattice points");
  if (opt.shells_per_octave < 1) throw InputError("decay_fit: shells_per_octave must be positive");

  double fmax = 0.0;
  for (const auto& s : slices)
    for (const cd& v : s) fmax = std::max(fmax, std::abs(v));
  double floor_v = std::max(kLogFloor, opt.noise_rel * fmax);

  std::vector<double> nyq(xg.dim());
  for (std::size_t a = 0; a < xg.dim(); ++a)
    nyq[a] = static_cast<double>(xg.counts()[a] / 2) * xg.spacing()[a];

  std::map<long long, Shell> shells;
  std::size_t count = 0;
  std::vector<double> xi(xg.dim());
  for (std::size_t m = 0; m < xg.size(); ++m) {
    xg.point(m, xi);
    bool in_band = true;
    for (std::size_t a = 0; a < xg.dim(); ++a)
      if (std::abs(xi[a]) > opt.nyquist_fraction * nyq[a] * (1.0 + 1e-12)) in_band = false;
    if (!in_band || !cone.contains(xi)) continue;
    ++count;
    double rho = norm2(xi);
    auto j = static_cast<long long>(
        std::floor(opt.shells_per_octave * std::log2(rho / cone.r_min) + 1e-12));
    Shell& sh = shells[j];
    for (const auto& s : slices) {
      double v = std::abs(s[m]);
      if (v > sh.sup) {
        sh.sup = v;
        sh.radius = rho;
      }
    }
  }
  if (count < kMinConePoints)
    throw InputError("decay_fit: only " + std::to_string(count) +
                     " frequency lattice points in the cone (need at least " +
                     std::to_string(kMinConePoints) + ")");

  std::vector<double> xs, ys;
  for (const auto& [j, sh] : shells) {
    double s = std::max(sh.sup, kLogFloor);
    if (s <= floor_v) break;
    xs.push_back(std::pow(sh.radius, 1.0 / alpha));
    ys.push_back(std::log(s));
  }

  DecayFit fit;
  fit.alpha = alpha;
  fit.n_points = count;
  fit.n_shells = xs.size();
  if (xs.size() < 3) {
    fit.saturated = true;
    fit.N_hat = std::numeric_limits<double>::infinity();
    fit.logC_hat = ys.empty() ? std::log(std::max(fmax, kLogFloor)) : ys.front();
    fit.residual = 0.0;
    return fit;
  }
  auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = xs[static_cast<std::size_t>(i)];
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd A1(n, 2);
  A1.col(0).setOnes();
  A1.col(1) = x;
  Eigen::VectorXd c1 = A1.colPivHouseholderQr().solve(y);
  double rms1 = std::sqrt((A1 * c1 - y).squaredNorm() / static_cast<double>(n));
  Eigen::MatrixXd A2(n, 3);
  A2.col(0).setOnes();
  A2.col(1) = x;
  A2.col(2) = x.array().square();
  Eigen::VectorXd c2 = A2.colPivHouseholderQr().solve(y);
  double rms2 = std::sqrt((A2 * c2 - y).squaredNorm() / static_cast<double>(n));

  fit.N_hat = -c1(1);
  fit.logC_hat = c1(0);
  fit.curvature = c2(2);
  // Decay faster than the model bends the log curve downwards; the linear
  // misfit then measures the excess decay, not a failure of the bound.
  fit.residual = fit.curvature < 0.0 ? rms2 : rms1;
  return fit;
}

}  // namespace

bool ConeSpec::contains(std::span<const double> xi) const {
  if (norm2(xi) < r_min) return false;
  return angle_between(xi, center) <= half_angle + 1e-12;
}

ConeSpec make_cone(std::vector<double> center, double half_angle, double r_min) {
  double nc = norm2(center);
  if (center.empty() || nc == 0.0 || !std::isfinite(nc))
    throw InputError("cone: center must be a nonzero finite vector");
  if (!(half_angle > 0.0 && half_angle < std::numbers::pi / 2))
    throw InputError("cone: half_angle must lie in (0, pi/2)");
  if (!(r_min > 0.0) || !std::isfinite(r_min)) throw InputError("cone: r_min must be positive");
  for (double& c : center) c /= nc;
  return ConeSpec{std::move(center), half_angle, r_min};
}

bool BallSpec::contains(std::span<const double> y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) s += (y[i] - center[i]) * (y[i] - center[i]);
  return std::sqrt(s) <= radius * (1.0 + 1e-12);
}

DecayFit decay_fit(const DstftField& F, const BallSpec& ball, const ConeSpec& cone, double alpha,
                   const FitOptions& opt) {
  if (!(ball.radius > 0.0)) throw InputError("decay_fit: ball radius must be positive");
  if (ball.center.size() != F.y_grid.dim())
    throw InputError("decay_fit: ball dimension does not match the y grid");
  std::vector<std::span<const cd>> slices;
  std::vector<double> y(F.y_grid.dim());
  for (std::size_t i = 0; i < F.y_grid.size(); ++i) {
    F.y_grid.point(i, y);
    if (ball.contains(y)) slices.push_back(F.slice(i));
  }
  return fit_slices(F.xi_grid, slices, cone, alpha, opt);
}

DecayFit decay_fit(const Spectrum& S, const ConeSpec& cone, double alpha, const FitOptions& opt) {
  std::vector<std::span<const cd>> slices{std::span<const cd>(S.values)};
  return fit_slices(S.freq_grid, slices, cone, alpha, opt);
}

bool is_regular(const DecayFit& fit, double threshold_N, const FitOptions& opt) {
  return fit.N_hat >= threshold_N && fit.residual <= opt.residual_cap;
}

bool regular_point_test(const DstftField& F, const BallSpec& ball, const ConeSpec& cone,
                        double alpha, double threshold_N, const FitOptions& opt) {
  return is_regular(decay_fit(F, ball, cone, alpha, opt), threshold_N, opt);
}

bool partial_wf_test(const Signal& f, const Window& chi, std::span<const double> y0,
                     const ConeSpec& cone, double alpha, double threshold_N,
                     const FitOptions& opt, DecayFit* fit_out) {
  f.validate();
  std::size_t k = chi.dim();
  if (k > f.grid.dim()) throw InputError("partial_wf_test: cut-off has more axes than the signal");
  if (y0.size() != k) throw InputError("partial_wf_test: y0 dimension does not match the cut-off");
  if (std::abs(chi.at(y0)) == 0.0)
    throw InputError("partial_wf_test: the cut-off vanishes at y0");
  Signal w(f.grid);
  std::vector<double> t(f.grid.dim());
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, t);
    w.values[i] = f.values[i] * chi.at(std::span<const double>(t).first(k));
  }
  DecayFit fit = decay_fit(dft(w), cone, alpha, opt);
  if (fit_out) *fit_out = fit;
  return is_regular(fit, threshold_N, opt);
}

WavefrontReport wavefront_scan(const DstftField& F, double alpha,
                               const std::vector<BallSpec>& y_cells,
                               const std::vector<ConeSpec>& cones, double threshold_N,
                               const FitOptions& opt) {
  if (y_cells.empty() || cones.empty())
    throw InputError("wavefront_scan: need at least one cell and one cone");
  WavefrontReport rep;
  rep.threshold_N = threshold_N;
  rep.residual_cap = opt.residual_cap;
  rep.alpha = alpha;
  rep.window_meta = F.window_meta;
  rep.entries.resize(y_cells.size() * cones.size());
  parallel_for(0, rep.entries.size(), [&](std::size_t e) {
    WavefrontEntry& en = rep.entries[e];
    en.cell = y_cells[e / cones.size()];
    en.cone = cones[e % cones.size()];
    en.fit = decay_fit(F, en.cell, en.cone, alpha, opt);
    en.regular = is_regular(en.fit, threshold_N, opt);
  });
  return rep;
}

WavefrontReport wavefront_scan(const Signal& f, const Window& g, const DirectionFrame& frame,
                               double alpha, const std::vector<BallSpec>& y_cells,
                               const std::vector<ConeSpec>& cones, double threshold_N,
                               const ScanOptions& opt) {
  std::vector<std::string> warnings;
  if (g.kind != WindowKind::GevreyBump) {
    if (opt.strict_window)
      throw InputError("wavefront_scan: window must be a compactly supported Gevrey bump (got " +
                       g.describe() + ")");
    warnings.push_back("window " + g.describe() +
                       " is not compactly supported; results are not covered by the regularity "
                       "criterion");
  }
  std::vector<double> zero(g.dim(), 0.0);
  if (std::abs(g.at(zero)) == 0.0) throw InputError("wavefront_scan: window vanishes at the origin");
  double bm = boundary_mass_fraction(f);
  if (bm > kBoundaryMassThreshold) {
    std::ostringstream os;
    os << "signal carries " << bm << " of its mass on the grid boundary; periodisation may add "
          "spurious singularities";
    warnings.push_back(os.str());
  }
  DstftField F = dstft_fast(f, g, frame, default_y_grid(f.grid, frame.k));
  WavefrontReport rep = wavefront_scan(F, alpha, y_cells, cones, threshold_N, opt.fit);
  rep.warnings = std::move(warnings);
  return rep;
}

bool global_regularity_check(const WavefrontReport& report) {
  if (report.entries.empty()) throw InputError("global_regularity_check: empty report");
  std::vector<const ConeSpec*> cones;
  for (const auto& e : report.entries) {
    bool seen = false;
    for (const auto* c : cones)
      if (c->center == e.cone.center && c->half_angle == e.cone.half_angle) seen = true;
    if (!seen) cones.push_back(&e.cone);
  }
  std::size_t n = cones.front()->center.size();
  auto covered = [&](std::span<const double> d) {
    for (const auto* c : cones)
      if (angle_between(d, c->center) <= c->half_angle + 1e-12) return true;
    return false;
  };
  auto fail = [&](std::span<const double> d) {
    std::ostringstream os;
    os.precision(6);
    os << "global_regularity_check: cone dictionary does not cover direction (";
    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? ", " : "") << d[i];
    os << ")";
    throw InputError(os.str());
  };
  if (n == 1) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> d{s};
      if (!covered(d)) fail(d);
    }
  } else if (n == 2) {
    const int steps = 7200;
    for (int i = 0; i < steps; ++i) {
      double th = 2.0 * std::numbers::pi * i / steps;
      std::vector<double> d{std::cos(th), std::sin(th)};
      if (!covered(d)) fail(d);
    }
  } else {
    // Points on the faces of the cube [-1, 1]^n, projected to the sphere.
    const int m = n == 3 ? 81 : 21;
    std::vector<int> idx(n - 1, 0);
    std::vector<double> d(n);
    for (std::size_t face = 0; face < n; ++face) {
      for (double sgn : {1.0, -1.0}) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
          std::size_t q = 0;
          for (std::size_t a = 0; a < n; ++a) {
            if (a == face) {
              d[a] = sgn;
            } else {
              d[a] = -1.0 + 2.0 * idx[q++] / (m - 1);
            }
          }
          if (!covered(d)) {
            double nd = norm2(d);
            for (double& x : d) x /= nd;
            fail(d);
          }
          std::size_t a = idx.size();
          while (a > 0 && ++idx[a - 1] == m) idx[--a] = 0;
          if (a == 0) break;
        }
      }
    }
  }
  return std::all_of(report.entries.begin(), report.entries.end(),
                     [](const WavefrontEntry& e) { return e.regular; });
}

std::vector<ConeSpec> cone_dictionary_2d(std::size_t count, double half_angle, double r_min) {
  if (count == 0) throw InputError("cone_dictionary_2d: count must be positive");
  std::vector<ConeSpec> out;
  for (std::size_t j = 0; j < count; ++j) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
    double c = std::cos(th), s = std::sin(th);
    if (std::abs(c) < 1e-15) c = 0.0;
    if (std::abs(s) < 1e-15) s = 0.0;
    out.push_back(make_cone({c, s}, half_angle, r_min));
  }
  return out;
}

double default_r_min(const Grid& xi_grid) {
  double d = 0.0;
  for (double h : xi_grid.spacing()) d = std::max(d, h);
  return 4.0 * d;
}

std::string report_to_json(const WavefrontReport& report) {
  using nlohmann::json;
  json j;
  j["threshold_N"] = report.threshold_N;
  j["residual_cap"] = report.residual_cap;
  j["alpha"] = report.alpha;
  j["window"] = report.window_meta;
  j["warnings"] = report.warnings;
  json entries = json::array();
  for (const auto& e : report.entries) {
    json je;
    je["cell"] = {{"center", e.cell.center}, {"radius", e.cell.radius}};
    je["cone"] = {{"center", e.cone.center},
                  {"half_angle_deg", e.cone.half_angle * 180.0 / std::numbers::pi},
                  {"r_min", e.cone.r_min}};
    json fit;
    if (std::isfinite(e.fit.N_hat)) {
      fit["N_hat"] = e.fit.N_hat;
    } else {
      fit["N_hat"] = nullptr;
    }
    fit["logC_hat"] = e.fit.logC_hat;
    fit["residual"] = e.fit.residual;
    fit["n_points"] = e.fit.n_points;
    fit["n_shells"] = e.fit.n_shells;
    fit["saturated"] = e.fit.saturated;
    fit["curvature"] = e.fit.curvature;
    je["fit"] = fit;
    je["regular"] = e.regular;
    entries.push_back(je);
  }
  j["entries"] = entries;
  std::size_t singular = 0;
  for (const auto& e : report.entries) singular += e.regular ? 0 : 1;
  j["singular_count"] = singular;
  return j.dump(2);
}

std::string report_to_csv(const WavefrontReport& report) {
  std::ostringstream os;
  os.precision(12);
  os << "cell_center,cell_radius,cone_center,half_angle_deg,N_hat,residual,regular\n";
  auto vec = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  };
  for (const auto& e : report.entries) {
    vec(e.cell.center);
    os << "," << e.cell.radius << ",";
    vec(e.cone.center);
    os << "," << e.cone.half_angle * 180.0 / std::numbers::pi << ",";
    if (std::isfinite(e.fit.N_hat)) {
      os << e.fit.N_hat;
    } else {
      os << "inf";
    }
    os << "," << e.fit.residual << "," << (e.regular ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace dstft
