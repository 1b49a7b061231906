#include "dstft/signal.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace dstft {
namespace {

std::atomic<double> g_dft_fault{1.0};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_as(b)) throw InputError(std::string(what) + ": grid mismatch");
}

}  // namespace

namespace testing_hooks {
void set_dft_scale_fault(double factor) { g_dft_fault.store(factor); }
}  // namespace testing_hooks

Signal::Signal(Grid g, std::vector<cd> v) : grid(std::move(g)), values(std::move(v)) {}
Signal::Signal(Grid g) : grid(std::move(g)), values(grid.size(), cd{}) {}

void Signal::validate() const {
  if (values.size() != grid.size())
    throw InputError("signal: " + std::to_string(values.size()) + " values for " +
                     std::to_string(grid.size()) + " grid points");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw InputError("signal: non-finite value at flat index " + std::to_string(i));
  }
}

Spectrum dft(const Signal& f) {
  f.validate();
  const Grid& g = f.grid;
  Grid fg = g.dual();
  const auto& n = g.counts();
  std::vector<cd> buf = f.values;

  std::vector<std::vector<cd>> pre(g.dim()), post(g.dim());
  for (std::size_t a = 0; a < g.dim(); ++a) {
    auto N = static_cast<long long>(n[a]);
    long long c = N / 2;
    pre[a].resize(n[a]);
    post[a].resize(n[a]);
    for (long long i = 0; i < N; ++i) {
      pre[a][i] = detail::unit_root(c * i, N);
      post[a][i] = std::polar(1.0, -kTwoPi * fg.coord(a, i) * g.origin()[a]);
    }
  }
  detail::scale_separable(buf, n, pre);
  detail::fft_inplace(buf, n, -1);
  detail::scale_separable(buf, n, post);
  double scale = g.cell_volume() * g_dft_fault.load();
  for (auto& v : buf) v *= scale;
  return Spectrum{std::move(fg), std::move(buf)};
}

Signal idft(const Spectrum& F, const Grid& time_grid) {
  require_same_grid(F.freq_grid, time_grid.dual(), "idft");
  if (F.values.size() != F.freq_grid.size()) throw InputError("idft: value count mismatch");
  const Grid& fg = F.freq_grid;
  const auto& n = time_grid.counts();
  std::vector<cd> buf = F.values;
  std::vector<std::vector<cd>> pre(fg.dim()), post(fg.dim());
  for (std::size_t a = 0; a < fg.dim(); ++a) {
    auto N = static_cast<long long>(n[a]);
    long long c = N / 2;
    pre[a].resize(n[a]);
    post[a].resize(n[a]);
    for (long long i = 0; i < N; ++i) {
      pre[a][i] = std::polar(1.0, kTwoPi * fg.coord(a, i) * time_grid.origin()[a]);
      post[a][i] = detail::unit_root(-c * i, N);
    }
  }
  detail::scale_separable(buf, n, pre);
  detail::fft_inplace(buf, n, +1);
  detail::scale_separable(buf, n, post);
  double scale = fg.cell_volume();
  for (auto& v : buf) v *= scale;
  return Signal(time_grid, std::move(buf));
}

Spectrum dft_oracle(const Signal& f, std::size_t cap) {
  f.validate();
  if (f.grid.size() > cap)
    throw InputError("dft_oracle: " + std::to_string(f.grid.size()) +
                     " samples exceed the oracle cap " + std::to_string(cap));
  const Grid& g = f.grid;
  Grid fg = g.dual();
  std::size_t d = g.dim();
  // kernel[a][m][i] = exp(-2 pi i xi_m t_i) on axis a
  std::vector<std::vector<cd>> kernel(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t N = g.counts()[a];
    kernel[a].resize(N * N);
    for (std::size_t m = 0; m < N; ++m)
      for (std::size_t i = 0; i < N; ++i)
        kernel[a][m * N + i] = std::polar(1.0, -kTwoPi * fg.coord(a, m) * g.coord(a, i));
  }
  std::vector<cd> out(fg.size());
  std::vector<std::size_t> mi(d), ti(d);
  for (std::size_t m = 0; m < fg.size(); ++m) {
    fg.unravel(m, mi);
    cd acc = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
      g.unravel(t, ti);
      cd ph = 1.0;
      for (std::size_t a = 0; a < d; ++a) ph *= kernel[a][mi[a] * g.counts()[a] + ti[a]];
      acc += f.values[t] * ph;
    }
    out[m] = acc * g.cell_volume();
  }
  return Spectrum{std::move(fg), std::move(out)};
}

cd inner_product(const Signal& f, const Signal& g) {
  require_same_grid(f.grid, g.grid, "inner_product");
  cd acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * std::conj(g.values[i]);
  return acc * f.grid.cell_volume();
}

cd inner_product_spectrum(const Spectrum& F, const Spectrum& G) {
  require_same_grid(F.freq_grid, G.freq_grid, "inner_product_spectrum");
  cd acc = 0.0;
  for (std::size_t i = 0; i < F.values.size(); ++i) acc += F.values[i] * std::conj(G.values[i]);
  return acc * F.freq_grid.cell_volume();
}

double l2_norm(const Signal& f) { return std::sqrt(std::abs(inner_product(f, f).real())); }

double boundary_mass_fraction(const Signal& f) {
  const Grid& g = f.grid;
  std::vector<std::size_t> idx(g.dim());
  double total = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double m = std::abs(f.values[i]);
    total += m;
    g.unravel(i, idx);
    for (std::size_t a = 0; a < g.dim(); ++a) {
      if (idx[a] == 0 || idx[a] + 1 == g.counts()[a]) {
        edge += m;
        break;
      }
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

Interpolator::Interpolator(const Signal& f, Interpolation kind)
    : grid_(f.grid), kind_(kind), samples_(f.values) {
  f.validate();
  if (kind_ == Interpolation::Trigonometric) {
    Spectrum F = dft(f);
    freq_ = F.freq_grid;
    coeffs_ = std::move(F.values);
    double dv = freq_.cell_volume();
    for (auto& c : coeffs_) c *= dv;
  }
}

bool Interpolator::inside(std::span<const double> x) const {
  for (std::size_t a = 0; a < grid_.dim(); ++a) {
    double h = grid_.spacing()[a];
    double lo = grid_.origin()[a] - 0.5 * h;
    double hi = grid_.origin()[a] + (static_cast<double>(grid_.counts()[a]) - 0.5) * h;
    if (!(x[a] >= lo && x[a] < hi)) return false;
  }
  return true;
}

cd Interpolator::operator()(std::span<const double> x) const {
  if (!inside(x)) return 0.0;
  return value_periodic(x);
}

cd Interpolator::value_periodic(std::span<const double> x) const {
  return kind_ == Interpolation::Trigonometric ? trig(x) : linear(x);
}

cd Interpolator::trig(std::span<const double> x) const {
  std::size_t d = grid_.dim();
  const auto& n = grid_.counts();
  std::vector<std::vector<cd>> ph(d);
  for (std::size_t a = 0; a < d; ++a) {
    ph[a].resize(n[a]);
    for (std::size_t m = 0; m < n[a]; ++m)
      ph[a][m] = std::polar(1.0, kTwoPi * freq_.coord(a, m) * x[a]);
    if (n[a] % 2 == 0) {
      // split Nyquist term: keeps the interpolant real for real samples
      double xn = freq_.coord(a, 0);
      double o = grid_.origin()[a];
      ph[a][0] = std::polar(1.0, kTwoPi * xn * o) * std::cos(kTwoPi * xn * (x[a] - o));
    }
  }
  std::vector<cd> cur = coeffs_;
  for (std::size_t a = d; a-- > 0;) {
    std::size_t N = n[a];
    std::size_t outer = cur.size() / N;
    std::vector<cd> next(outer);
    for (std::size_t j = 0; j < outer; ++j) {
      cd acc = 0.0;
      const cd* row = cur.data() + j * N;
      for (std::size_t m = 0; m < N; ++m) acc += row[m] * ph[a][m];
      next[j] = acc;
    }
    cur.swap(next);
  }
  return cur[0];
}

cd Interpolator::linear(std::span<const double> x) const {
  std::size_t d = grid_.dim();
  std::vector<long long> base(d);
  std::vector<double> w(d);
  for (std::size_t a = 0; a < d; ++a) {
    double u = (x[a] - grid_.origin()[a]) / grid_.spacing()[a];
    double fl = std::floor(u);
    base[a] = static_cast<long long>(fl);
    w[a] = u - fl;
  }
  cd acc = 0.0;
  std::vector<std::size_t> idx(d);
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double weight = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      bool up = (corner >> a) & 1U;
      long long N = static_cast<long long>(grid_.counts()[a]);
      long long i = ((base[a] + (up ? 1 : 0)) % N + N) % N;
      weight *= up ? w[a] : 1.0 - w[a];
      idx[a] = static_cast<std::size_t>(i);
    }
    if (weight != 0.0) acc += weight * samples_[grid_.ravel(idx)];
  }
  return acc;
}

}  // namespace dstft
