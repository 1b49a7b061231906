#include "dstft/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace dstft::fixtures {
namespace {

std::vector<double> unit(std::vector<double> u, std::size_t n, const char* who) {
  if (u.size() != n) throw InputError(std::string(who) + ": direction has wrong dimension");
  double s = 0.0;
  for (double x : u) s += x * x;
  s = std::sqrt(s);
  if (s == 0.0 || !std::isfinite(s)) throw InputError(std::string(who) + ": direction is zero");
  for (double& x : u) x /= s;
  return u;
}

template <class Fn>
Signal tabulate(const Grid& grid, Fn fn) {
  Signal out(grid);
  std::vector<double> t(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    out.values[i] = fn(t);
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double uniform01(std::mt19937_64& rng) {
  // 53 random bits; independent of the standard library's distributions
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Signal gaussian(const Grid& grid, std::vector<double> center, double width) {
  if (center.size() != grid.dim()) throw InputError("gaussian: center has wrong dimension");
  if (!(width > 0.0)) throw InputError("gaussian: width must be positive");
  return tabulate(grid, [&](const std::vector<double>& t) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < t.size(); ++a) r2 += (t[a] - center[a]) * (t[a] - center[a]);
    return cd(std::exp(-std::numbers::pi * r2 / (width * width)), 0.0);
  });
}

Signal heaviside_sheet(const Grid& grid, std::vector<double> u, double c) {
  u = unit(std::move(u), grid.dim(), "heaviside_sheet");
  return tabulate(grid, [&](const std::vector<double>& t) {
    return cd(dot(u, t) - c >= 0.0 ? 1.0 : 0.0, 0.0);
  });
}

Signal delta_sheet(const Grid& grid, std::vector<double> u, double c, double width) {
  u = unit(std::move(u), grid.dim(), "delta_sheet");
  if (!(width > 0.0)) throw InputError("delta_sheet: width must be positive");
  return tabulate(grid, [&](const std::vector<double>& t) {
    double s = (dot(u, t) - c) / width;
    return cd(std::exp(-std::numbers::pi * s * s) / width, 0.0);
  });
}

Signal plane_wave(const Grid& grid, std::vector<double> xi0) {
  if (xi0.size() != grid.dim()) throw InputError("plane_wave: frequency has wrong dimension");
  return tabulate(grid, [&](const std::vector<double>& t) {
    return std::polar(1.0, 2.0 * std::numbers::pi * dot(xi0, t));
  });
}

Signal sum(const Signal& a, const Signal& b) {
  if (!a.grid.same_as(b.grid)) throw InputError("sum: grids differ");
  Signal out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

Signal random_bandlimited(const Grid& grid, std::uint64_t seed, double bandwidth) {
  if (!(bandwidth > 0.0)) throw InputError("random_bandlimited: bandwidth must be positive");
  std::mt19937_64 rng(seed);
  Spectrum S{grid.dual(), std::vector<cd>(grid.size())};
  std::vector<double> xi(grid.dim());
  for (std::size_t m = 0; m < S.values.size(); ++m) {
    S.freq_grid.point(m, xi);
    double re = 2.0 * uniform01(rng) - 1.0;
    double im = 2.0 * uniform01(rng) - 1.0;
    bool in_band = true;
    for (double x : xi)
      if (std::abs(x) > bandwidth) in_band = false;
    if (in_band) S.values[m] = cd(re, im);
  }
  return idft(S, grid);
}

Signal modulate(const Signal& f, std::span<const double> xi0) {
  Signal out = f;
  std::vector<double> t(f.grid.dim());
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, t);
    double ph = 0.0;
    for (std::size_t a = 0; a < t.size(); ++a) ph += xi0[a] * t[a];
    out.values[i] *= std::polar(1.0, 2.0 * std::numbers::pi * ph);
  }
  return out;
}

}  // namespace dstft::fixtures
