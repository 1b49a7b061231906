// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "dstft/fixtures.hpp"
#include "dstft/synthesis.hpp"
#include "dstft/wavefront.hpp"

using namespace dstft;

namespace {

constexpr double kPi = std::numbers::pi;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_abs(const std::vector<cd>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

double rel_max_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  double s = max_abs(b);
  return s > 0.0 ? m / s : m;
}

double rel_l2(const Signal& a, const Signal& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return std::sqrt(num / den);
}

std::vector<Signal> small_fixtures(const Grid& g) {
  std::size_t n = g.dim();
  std::vector<double> zero(n, 0.0), u(n, 0.0), xi(n, 0.0);
  u[0] = 1.0;
  if (n > 1) u[1] = 0.5;
  xi[0] = 2 * g.dual().spacing()[0];
  Signal gauss = fixtures::gaussian(g, zero, 0.8);
  return {gauss,
          fixtures::heaviside_sheet(g, u, 0.1),
          fixtures::delta_sheet(g, u, -0.2, 0.3),
          fixtures::plane_wave(g, xi),
          fixtures::random_bandlimited(g, 12, 1.5),
          fixtures::sum(gauss, fixtures::plane_wave(g, xi)),
          fixtures::modulate(gauss, xi)};
}

Result oracle_equivalence() {
  double worst_fwd = 0.0, worst_syn = 0.0;
  int cases = 0;
  struct Setup {
    Grid g;
    DirectionFrame fr;
  };
  std::vector<Setup> setups{{Grid::centered({16}, {0.25}), identity_frame(1, 1)},
                            {Grid::centered({16, 16}, {0.25, 0.25}), identity_frame(2, 1)},
                            {Grid::centered({16, 16}, {0.25, 0.25}), build_frame({{1.0, 1.0}})},
                            {Grid::centered({12, 16}, {0.3, 0.25}), build_frame({{2.0, -1.0}})},
                            {Grid::centered({16, 16}, {0.25, 0.25}), identity_frame(2, 2)},
                            {Grid::centered({16, 16}, {0.25, 0.25}), build_frame({{1.0, 0.3}, {0.2, 1.0}})}};
  for (const auto& s : setups) {
    Grid y = default_y_grid(s.g, s.fr.k);
    std::vector<Window> ws;
    ws.push_back(gaussian_window(y, std::vector<double>(s.fr.k, 1.0)));
    double rad = 1e300;
    for (std::size_t a = 0; a < y.dim(); ++a) rad = std::min({rad, -y.origin()[a], y.upper(a)});
    rad *= 0.9;
    ws.push_back(gevrey_bump(y, rad, 1.5));
    for (const auto& f : small_fixtures(s.g))
      for (const auto& w : ws) {
        DstftField fast = dstft_fast(f, w, s.fr, y);
        DstftField direct = dstft_direct(f, w, s.fr, y);
        worst_fwd = std::max(worst_fwd, rel_max_diff(fast.values, direct.values));
        worst_syn = std::max(worst_syn, rel_max_diff(dso_fast(fast, w, s.fr, s.g).values,
                                                     dso_direct(fast, w, s.fr, s.g).values));
        ++cases;
      }
  }
  return {worst_fwd <= 1e-10 && worst_syn <= 1e-10,
          fmt("%g cases, max rel diff dstft %.2e, dso %.2e (tol 1e-10)", cases, worst_fwd, worst_syn)};
}

Result reconstruction() {
  Grid g = Grid::centered({64, 64}, {0.125, 0.125});
  Signal gauss = fixtures::gaussian(g, {0.3, -0.2}, 1.0);
  Signal mod = fixtures::modulate(gauss, std::vector<double>{1.5, -1.0});
  double worst = 0.0;
  for (std::size_t k : {1, 2}) {
    Grid wg = default_y_grid(g, k);
    Window w = gaussian_window(wg, std::vector<double>(k, 1.0));
    for (const Signal* f : {&gauss, &mod}) worst = std::max(worst, rel_l2(reconstruct(*f, w, w, identity_frame(2, k)), *f));
  }
  return {worst <= 1e-3, fmt("max rel L2 error %.2e over 4 runs (tol 1e-3)", worst)};
}

Result orthogonality() {
  Grid g = Grid::centered({32, 32}, {0.25, 0.25});
  Grid wg = default_y_grid(g, 1);
  std::vector<Window> ws{gaussian_window(wg, {1.0}), gaussian_window(wg, {1.6}), gevrey_bump(wg, 3.0, 1.5)};
  Signal f1 = fixtures::gaussian(g, {0.2, -0.3}, 1.2);
  Signal f2 = fixtures::modulate(fixtures::gaussian(g, {-0.1, 0.4}, 1.0), std::vector<double>{0.5, 0.25});
  double e_frame = 0.0, u_frame = 0.0;
  for (const auto& a : ws)
    for (const auto& b : ws) {
      auto r = orthogonality_check(f1, f2, a, b, identity_frame(2, 1));
      e_frame = std::max(e_frame, std::abs(r.lhs - r.rhs) / std::abs(r.rhs));
      r = orthogonality_check(f1, f2, a, b, build_frame({{1.0, 1.0}}));
      u_frame = std::max(u_frame, std::abs(r.lhs - r.rhs) / std::abs(r.rhs));
    }
  return {std::max(e_frame, u_frame) <= 1e-5,
          fmt("3x3 windows, max rel error e-frame %.2e, u-frame %.2e (tol 1e-5)", e_frame, u_frame)};
}

Result frame_change() {
  Grid g = Grid::centered({64, 64}, {0.125, 0.125});
  Signal f = fixtures::gaussian(g, {0.1, -0.2}, 0.6);
  Window w = gaussian_window(default_y_grid(g, 1), {1.0});
  DirectionFrame fr = build_frame({{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
  Grid y = default_y_grid(g, 1);
  DstftField F = dstft_fast(f, w, fr, y);
  Signal h = pullback(f, fr, g);
  DirectionFrame e = identity_frame(2, 1);
  // Probes where the mapped frequency stays inside the band the sampled
  // pullback can represent.
  double band = 0.5 / g.spacing()[0];
  double err = 0.0;
  std::size_t probes = 0;
  for (std::size_t yi = 0; yi < y.size(); yi += 4)
    for (std::size_t m = 0; m < F.xi_grid.size(); m += 37) {
      auto xi = F.xi_grid.point(m);
      auto eta = frequency_map(xi, fr);
      if (std::max(std::abs(eta[0]), std::abs(eta[1])) >= band) continue;
      auto yp = y.point(yi);
      err = std::max(err, std::abs(F.slice(yi)[m] - dstft_direct_at(h, w, e, yp, eta)));
      ++probes;
    }
  double rel = err / max_abs(F.values);
  return {rel <= 1e-4, fmt("%g probes, max rel error %.2e (tol 1e-4)", static_cast<double>(probes), rel)};
}

Result window_change_identity() {
  Grid g = Grid::centered({64}, {0.125});
  Signal f = fixtures::modulate(fixtures::gaussian(g, {0.3}, 0.8), std::vector<double>{0.75});
  Window w = gaussian_window(g, {1.0});
  DirectionFrame fr = identity_frame(1, 1);
  Grid y = default_y_grid(g, 1);
  DstftField Fg = dstft_fast(f, w, fr, y);
  std::vector<std::pair<Window, Window>> pairs{{w, gaussian_window(g, {0.7})},
                                               {w, gevrey_bump(g, 1.5, 1.5)},
                                               {gaussian_window(g, {1.3}), gevrey_bump(g, 2.0, 2.0)}};
  double worst = 0.0;
  for (const auto& [gamma, phi] : pairs)
    worst = std::max(worst, rel_max_diff(window_change(Fg, w, gamma, phi, fr).values,
                                         dstft_fast(f, phi, fr, y).values));
  return {worst <= 1e-3, fmt("3 window pairs, max rel error %.2e (tol 1e-3)", worst)};
}

struct WfFixture {
  Grid grid = Grid::centered({128, 128}, {1.0 / 32, 1.0 / 32});
  Grid wgrid = default_y_grid(grid, 1);
  DirectionFrame frame = identity_frame(2, 1);
  std::vector<BallSpec> cells{{{-0.75}, 0.05}, {{0.0}, 0.05}, {{0.75}, 0.05}};
  std::vector<ConeSpec> cones = cone_dictionary_2d(16, 15.0 * kPi / 180, default_r_min(grid.dual()));
  double alpha = 1.5;
  std::vector<Window> windows{gevrey_bump(wgrid, 0.5, 1.5), gevrey_bump(wgrid, 0.25, 1.5)};
  Signal step = fixtures::heaviside_sheet(grid, {1.0, 0.0}, 0.0);
  Signal smooth = fixtures::gaussian(grid, {0.0, 0.0}, 0.7);
};

Result wavefront_detection(const WfFixture& fx) {
  std::size_t wrong = 0, singular_step = 0, singular_smooth = 0;
  std::vector<bool> first;
  bool identical = true;
  double max_sing_N = 0.0, min_reg_N = std::numeric_limits<double>::infinity();
  for (std::size_t wi = 0; wi < fx.windows.size(); ++wi) {
    auto rep = wavefront_scan(fx.step, fx.windows[wi], fx.frame, fx.alpha, fx.cells, fx.cones, 1.0);
    std::vector<bool> v;
    for (const auto& e : rep.entries) {
      bool want_sing = e.cell.center[0] == 0.0 && std::abs(e.cone.center[1]) < std::sin(15.0 * kPi / 180);
      if (e.regular == want_sing) ++wrong;
      if (!e.regular) {
        ++singular_step;
        max_sing_N = std::max(max_sing_N, e.fit.N_hat);
      } else {
        min_reg_N = std::min(min_reg_N, e.fit.N_hat);
      }
      v.push_back(e.regular);
    }
    if (wi == 0)
      first = v;
    else
      identical = identical && v == first;
    auto rs = wavefront_scan(fx.smooth, fx.windows[wi], fx.frame, fx.alpha, fx.cells, fx.cones, 1.0);
    for (const auto& e : rs.entries) singular_smooth += e.regular ? 0 : 1;
  }
  bool pass = wrong == 0 && identical && singular_smooth == 0;
  return {pass, fmt("step: %g misclassified of 96, windows agree=%g; gaussian singular=%g", static_cast<double>(wrong),
                    identical ? 1.0 : 0.0, static_cast<double>(singular_smooth)) +
                    fmt("; step singular %g, max singular N %.2f", static_cast<double>(singular_step), max_sing_N) +
                    fmt(", min regular N %.2f", min_reg_N)};
}

Result partial_equivalence(const WfFixture& fx) {
  std::size_t checked = 0, differ = 0;
  for (const Signal* f : {&fx.step, &fx.smooth})
    for (const auto& w : fx.windows) {
      DstftField F = dstft_fast(*f, w, fx.frame, default_y_grid(fx.grid, 1));
      for (const auto& cell : fx.cells)
        for (const auto& cone : fx.cones) {
          bool a = regular_point_test(F, cell, cone, fx.alpha, 1.0);
          bool b = partial_wf_test(*f, shifted(w, cell.center), cell.center, cone, fx.alpha, 1.0);
          ++checked;
          differ += a != b ? 1 : 0;
        }
    }
  return {differ == 0, fmt("%g (cell, cone) pairs, %g disagreements", static_cast<double>(checked),
                           static_cast<double>(differ))};
}

Result decay_calibration() {
  DstftField F;
  F.y_grid = Grid({0.0}, {1.0}, {2});
  F.xi_grid = Grid::centered({256, 256}, {1.0 / 256, 1.0 / 256}).dual();
  F.frame = identity_frame(2, 1);
  F.source_origin = {-0.5, -0.5};
  F.values.resize(2 * F.xi_grid.size());
  for (std::size_t m = 0; m < F.xi_grid.size(); ++m) {
    auto p = F.xi_grid.point(m);
    F.values[m] = std::exp(-3.0 * std::sqrt(std::hypot(p[0], p[1])));
  }
  std::copy(F.slice(0).begin(), F.slice(0).end(), F.slice(1).begin());
  double worst = 0.0;
  for (const auto& c : cone_dictionary_2d(8, 0.3, 4.0)) {
    DecayFit fit = decay_fit(F, {{0.0}, 0.1}, c, 2.0);
    worst = std::max(worst, std::abs(fit.N_hat - 3.0) / 3.0);
  }
  return {worst <= 0.02, fmt("8 cones, max |N_hat - 3|/3 = %.2e (tol 2e-2)", worst)};
}

Result classical_reduction() {
  Grid g = Grid::centered({16, 16}, {0.25, 0.25});
  Signal f = fixtures::random_bandlimited(g, 4, 1.5);
  Window w = gaussian_window(g, {1.0, 0.8});
  DstftField F = dstft_fast(f, w, identity_frame(2, 2), default_y_grid(g, 2));
  Grid xg = g.dual();
  std::vector<cd> expo(g.size() * xg.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto t = g.point(i);
    for (std::size_t m = 0; m < xg.size(); ++m) {
      auto xi = xg.point(m);
      expo[i * xg.size() + m] = std::polar(1.0, -2 * kPi * (t[0] * xi[0] + t[1] * xi[1]));
    }
  }
  double err = 0.0;
  for (std::size_t yi = 0; yi < g.size(); ++yi) {
    auto y = g.point(yi);
    std::vector<cd> acc(xg.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto t = g.point(i);
      double d0 = (t[0] - y[0]) / 1.0, d1 = (t[1] - y[1]) / 0.8;
      cd fw = f.values[i] * std::exp(-kPi * (d0 * d0 + d1 * d1));
      for (std::size_t m = 0; m < xg.size(); ++m) acc[m] += fw * expo[i * xg.size() + m];
    }
    for (std::size_t m = 0; m < xg.size(); ++m)
      err = std::max(err, std::abs(acc[m] * g.cell_volume() - F.slice(yi)[m]));
  }
  return {err <= 1e-10, fmt("all 65536 (y, xi) points, max abs error %.2e (tol 1e-10)", err)};
}

}  // namespace

int main() {
  WfFixture* fx = nullptr;
  std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"reconstruction", reconstruction},
      {"orthogonality relation", orthogonality},
      {"frame change", frame_change},
      {"window change", window_change_identity},
      {"wavefront detection", [&] { return wavefront_detection(*fx); }},
      {"partial/directional equivalence", [&] { return partial_equivalence(*fx); }},
      {"decay calibration", decay_calibration},
      {"k=n classical STFT", classical_reduction}};
  std::vector<double> budget{30, 60, 0, 0, 0, 120, 0, 0, 0};
  WfFixture shared;
  fx = &shared;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget[i] > 0 && dt > budget[i]) {
      r.pass = false;
      r.detail += fmt(" [over the %g s budget]", budget[i]);
    }
    failed += r.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s  %s  (%.2f s)\n", i + 1, r.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                r.detail.c_str(), dt);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
