#include "dstft/windows.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dstft {
namespace {

double bump_profile(double rho2, double alpha) {
  if (rho2 >= 1.0) return 0.0;
  double q = 1.0 / (alpha - 1.0);
  return std::exp(-std::pow(1.0 - rho2, -q));
}

std::vector<cd> sample(const Window& w) {
  std::vector<cd> v(w.grid.size());
  std::vector<double> p(w.grid.dim());
  for (std::size_t i = 0; i < v.size(); ++i) {
    w.grid.point(i, p);
    v[i] = w.at(p);
  }
  return v;
}

// Fourth-order central difference weights at offsets -3..3, before the 1/h^q
// scaling.
constexpr std::array<std::array<double, 7>, 5> kStencil{{
    {0, 0, 0, 1, 0, 0, 0},
    {0, 1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12, 0},
    {0, -1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0},
    {1.0 / 8, -8.0 / 8, 13.0 / 8, 0, -13.0 / 8, 8.0 / 8, -1.0 / 8},
    {-1.0 / 6, 12.0 / 6, -39.0 / 6, 56.0 / 6, -39.0 / 6, 12.0 / 6, -1.0 / 6},
}};

std::vector<cd> differentiate(const std::vector<cd>& v, const Grid& g, std::size_t axis, int order) {
  if (order == 0) return v;
  std::vector<cd> out(v.size());
  std::vector<std::size_t> idx(g.dim());
  const auto& st = kStencil[static_cast<std::size_t>(order)];
  double scale = std::pow(g.spacing()[axis], -order);
  auto N = static_cast<long long>(g.counts()[axis]);
  for (std::size_t i = 0; i < v.size(); ++i) {
    g.unravel(i, idx);
    auto base = static_cast<long long>(idx[axis]);
    cd acc = 0.0;
    for (int s = -3; s <= 3; ++s) {
      double c = st[static_cast<std::size_t>(s + 3)];
      long long j = base + s;
      if (c == 0.0 || j < 0 || j >= N) continue;
      idx[axis] = static_cast<std::size_t>(j);
      acc += c * v[g.ravel(idx)];
    }
    out[i] = acc * scale;
  }
  return out;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

bool next_multi_index(std::vector<int>& m, int cap) {
  for (std::size_t a = m.size(); a-- > 0;) {
    if (++m[a] <= cap) return true;
    m[a] = 0;
  }
  return false;
}

}  // namespace

cd Window::at(std::span<const double> t) const {
  switch (kind) {
    case WindowKind::Gaussian: {
      double e = 0.0;
      for (std::size_t j = 0; j < sigma.size(); ++j) {
        double x = t[j] - center[j];
        e += x * x / (sigma[j] * sigma[j]);
      }
      return std::exp(-std::numbers::pi * e);
    }
    case WindowKind::GevreyBump: {
      double r2 = 0.0;
      for (std::size_t j = 0; j < center.size(); ++j) {
        double x = (t[j] - center[j]) / support_radius;
        r2 += x * x;
      }
      return bump_profile(r2, alpha);
    }
    case WindowKind::Custom:
      break;
  }
  std::vector<std::size_t> idx(grid.dim());
  bool hit = true;
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    double u = (t[a] - grid.origin()[a]) / grid.spacing()[a];
    double r = std::round(u);
    if (std::abs(u - r) > 1e-9 || r < 0 || r >= static_cast<double>(grid.counts()[a])) {
      hit = false;
      break;
    }
    idx[a] = static_cast<std::size_t>(r);
  }
  if (hit) return values[grid.ravel(idx)];
  return (*interp)(t);
}

std::string Window::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto vec = [&](const std::vector<double>& v) {
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
  };
  switch (kind) {
    case WindowKind::Gaussian:
      os << "gaussian sigma=";
      vec(sigma);
      break;
    case WindowKind::GevreyBump:
      os << "gevrey_bump radius=" << support_radius << " alpha=" << alpha;
      break;
    case WindowKind::Custom:
      os << "custom";
      break;
  }
  if (kind != WindowKind::Custom && std::any_of(center.begin(), center.end(), [](double c) { return c != 0.0; })) {
    os << " center=";
    vec(center);
  }
  return os.str();
}

Window gaussian_window(const Grid& grid, std::vector<double> sigma) {
  if (sigma.size() != grid.dim())
    throw InputError("gaussian_window: sigma has " + std::to_string(sigma.size()) +
                     " entries for a " + std::to_string(grid.dim()) + "-dimensional grid");
  for (double s : sigma)
    if (!(s > 0.0) || !std::isfinite(s)) throw InputError("gaussian_window: sigma must be positive");
  Window w;
  w.grid = grid;
  w.kind = WindowKind::Gaussian;
  w.sigma = std::move(sigma);
  w.center.assign(grid.dim(), 0.0);
  w.values = sample(w);
  return w;
}

Window gevrey_bump(const Grid& grid, double radius, double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw InputError("gevrey_bump: alpha must be greater than 1");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InputError("gevrey_bump: radius must be positive");
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    double half = std::min(-grid.origin()[a], grid.upper(a));
    if (radius >= half)
      throw InputError("gevrey_bump: radius " + std::to_string(radius) +
                       " does not fit inside the grid half-extent " + std::to_string(half) +
                       " on axis " + std::to_string(a));
  }
  Window w;
  w.grid = grid;
  w.kind = WindowKind::GevreyBump;
  w.alpha = alpha;
  w.support_radius = radius;
  w.center.assign(grid.dim(), 0.0);
  w.values = sample(w);
  return w;
}

Window custom_window(Signal samples, Interpolation interp) {
  samples.validate();
  if (std::all_of(samples.values.begin(), samples.values.end(), [](cd v) { return v == cd{}; }))
    throw InputError("custom_window: window is identically zero");
  Window w;
  w.grid = samples.grid;
  w.kind = WindowKind::Custom;
  w.values = samples.values;
  w.interp = std::make_shared<const Interpolator>(samples, interp);
  return w;
}

Window shifted(const Window& w, std::span<const double> delta) {
  if (delta.size() != w.dim()) throw InputError("shifted: shift dimension mismatch");
  if (w.kind != WindowKind::Custom) {
    Window out = w;
    for (std::size_t j = 0; j < w.dim(); ++j) out.center[j] += delta[j];
    out.values = sample(out);
    return out;
  }
  std::vector<cd> v(w.grid.size());
  std::vector<double> p(w.dim());
  for (std::size_t i = 0; i < v.size(); ++i) {
    w.grid.point(i, p);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= delta[j];
    v[i] = w.at(p);
  }
  return custom_window(Signal(w.grid, std::move(v)), w.interp->kind());
}

Signal window_signal(const Window& w) { return Signal(w.grid, w.values); }

PairingCert pairing_check(const Window& g, const Window& phi, double rel_threshold) {
  if (!g.grid.same_as(phi.grid)) throw InputError("pairing_check: window grids differ");
  Signal sg = window_signal(g), sp = window_signal(phi);
  PairingCert c;
  c.value = inner_product(sg, sp);
  c.magnitude = std::abs(c.value);
  c.threshold = rel_threshold * l2_norm(sg) * l2_norm(sp);
  c.admissible = c.magnitude >= c.threshold && c.magnitude > 0.0;
  return c;
}

double gs_seminorm_probe(const Window& w, double a, double alpha, double beta, int p_max,
                         int q_max) {
  if (p_max < 0 || q_max < 0 || p_max > 4 || q_max > 4)
    throw InputError("gs_seminorm_probe: caps must lie in [0, 4]");
  if (!(a > 0.0)) throw InputError("gs_seminorm_probe: a must be positive");
  const Grid& g = w.grid;
  std::size_t k = g.dim();
  double best = 0.0;
  std::vector<int> q(k, 0);
  std::vector<double> pt(k);
  do {
    std::vector<cd> d = w.values;
    int qsum = 0;
    double qfact = 1.0;
    for (std::size_t ax = 0; ax < k; ++ax) {
      d = differentiate(d, g, ax, q[ax]);
      qsum += q[ax];
      qfact *= factorial(q[ax]);
    }
    std::vector<int> p(k, 0);
    do {
      int psum = 0;
      double pfact = 1.0;
      for (std::size_t ax = 0; ax < k; ++ax) {
        psum += p[ax];
        pfact *= factorial(p[ax]);
      }
      double coeff = std::pow(a, psum + qsum) / (std::pow(pfact, beta) * std::pow(qfact, alpha));
      for (std::size_t i = 0; i < d.size(); ++i) {
        g.point(i, pt);
        double mono = 1.0;
        for (std::size_t ax = 0; ax < k; ++ax) mono *= std::pow(std::abs(pt[ax]), p[ax]);
        best = std::max(best, coeff * mono * std::abs(d[i]));
      }
    } while (next_multi_index(p, p_max));
  } while (next_multi_index(q, q_max));
  return best;
}

}  // namespace dstft
