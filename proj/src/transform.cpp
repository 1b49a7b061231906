#include "dstft/transform.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "dstft/parallel.hpp"

namespace dstft {
namespace {

using WindowEval = std::function<cd(std::span<const double>)>;

void check_shapes(const Signal& f, std::size_t window_dim, const DirectionFrame& frame,
                  std::size_t y_dim) {
  f.validate();
  if (f.grid.dim() != frame.n)
    throw InputError("dstft: signal dimension " + std::to_string(f.grid.dim()) +
                     " does not match frame dimension " + std::to_string(frame.n));
  if (window_dim != frame.k)
    throw InputError("dstft: window dimension " + std::to_string(window_dim) +
                     " does not match k = " + std::to_string(frame.k));
  if (y_dim != frame.k)
    throw InputError("dstft: y dimension " + std::to_string(y_dim) +
                     " does not match k = " + std::to_string(frame.k));
}

// conj(g(u.t - y)) for every t of the signal grid.
std::vector<cd> window_row(const Grid& tg, const WindowEval& g, const DirectionFrame& frame,
                           std::span<const double> y) {
  std::vector<cd> row(tg.size());
  std::vector<double> t(tg.dim()), s(frame.k);
  for (std::size_t i = 0; i < tg.size(); ++i) {
    tg.point(i, t);
    frame.project(t, s);
    for (std::size_t j = 0; j < frame.k; ++j) s[j] -= y[j];
    row[i] = std::conj(g(s));
  }
  return row;
}

DstftField make_field(const Signal& f, const DirectionFrame& frame, const Grid& y_grid,
                      std::string meta) {
  DstftField F;
  F.y_grid = y_grid;
  F.xi_grid = f.grid.dual();
  F.frame = frame;
  F.window_meta = std::move(meta);
  F.source_origin = f.grid.origin();
  F.values.assign(y_grid.size() * F.xi_grid.size(), cd{});
  return F;
}

DstftField fast_impl(const Signal& f, const WindowEval& g, const DirectionFrame& frame,
                     const Grid& y_grid, std::string meta) {
  DstftField F = make_field(f, frame, y_grid, std::move(meta));
  parallel_for(0, y_grid.size(), [&](std::size_t yi) {
    std::vector<double> y = y_grid.point(yi);
    std::vector<cd> w = window_row(f.grid, g, frame, y);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= f.values[i];
    Spectrum S = dft(Signal(f.grid, std::move(w)));
    std::copy(S.values.begin(), S.values.end(), F.slice(yi).begin());
  });
  return F;
}

}  // namespace

Grid DstftField::source_grid() const {
  std::vector<double> h(xi_grid.dim());
  for (std::size_t a = 0; a < h.size(); ++a)
    h[a] = 1.0 / (static_cast<double>(xi_grid.counts()[a]) * xi_grid.spacing()[a]);
  return Grid(source_origin, h, xi_grid.counts());
}

Grid default_y_grid(const Grid& signal_grid, std::size_t k) { return signal_grid.project(k); }

DstftField dstft_direct(const Signal& f, const Window& g, const DirectionFrame& frame,
                        const Grid& y_grid, std::size_t cap) {
  check_shapes(f, g.dim(), frame, y_grid.dim());
  if (f.grid.size() > cap)
    throw InputError("dstft_direct: " + std::to_string(f.grid.size()) +
                     " samples exceed the oracle cap " + std::to_string(cap));
  DstftField F = make_field(f, frame, y_grid, g.describe());
  WindowEval ge = [&g](std::span<const double> s) { return g.at(s); };
  parallel_for(0, y_grid.size(), [&](std::size_t yi) {
    std::vector<double> y = y_grid.point(yi);
    std::vector<cd> w = window_row(f.grid, ge, frame, y);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= f.values[i];
    Spectrum S = dft_oracle(Signal(f.grid, std::move(w)), cap);
    std::copy(S.values.begin(), S.values.end(), F.slice(yi).begin());
  });
  return F;
}

cd dstft_direct_at(const Signal& f, const Window& g, const DirectionFrame& frame,
                   std::span<const double> y, std::span<const double> xi) {
  check_shapes(f, g.dim(), frame, y.size());
  if (xi.size() != frame.n) throw InputError("dstft: frequency dimension mismatch");
  std::vector<double> t(frame.n), s(frame.k);
  cd acc = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, t);
    frame.project(t, s);
    for (std::size_t j = 0; j < frame.k; ++j) s[j] -= y[j];
    double ph = 0.0;
    for (std::size_t j = 0; j < frame.n; ++j) ph += t[j] * xi[j];
    acc += f.values[i] * std::conj(g.at(s)) * std::polar(1.0, -2.0 * std::numbers::pi * ph);
  }
  return acc * f.grid.cell_volume();
}

DstftField dstft_fast(const Signal& f, const Window& g, const DirectionFrame& frame,
                      const Grid& y_grid) {
  check_shapes(f, g.dim(), frame, y_grid.dim());
  return fast_impl(f, [&g](std::span<const double> s) { return g.at(s); }, frame, y_grid,
                   g.describe());
}

DstftField partial_stft(const Signal& f, const std::vector<Window>& g_list,
                        const DirectionFrame& frame, const Grid& y_grid) {
  check_shapes(f, g_list.size(), frame, y_grid.dim());
  std::string meta = "product[";
  for (std::size_t i = 0; i < g_list.size(); ++i) {
    const Window& gi = g_list[i];
    if (gi.dim() != 1)
      throw InputError("partial_stft: factor " + std::to_string(i) + " is not one-dimensional");
    double hw = gi.grid.spacing()[0], hy = y_grid.spacing()[i];
    if (std::abs(hw - hy) > 1e-12 * hy)
      throw InputError("partial_stft: factor " + std::to_string(i) + " has spacing " +
                       std::to_string(hw) + " but y axis " + std::to_string(i) + " has spacing " +
                       std::to_string(hy));
    meta += (i ? "; " : "") + gi.describe();
  }
  meta += "]";
  WindowEval ge = [&g_list](std::span<const double> s) {
    cd v = 1.0;
    for (std::size_t i = 0; i < g_list.size(); ++i) v *= g_list[i].at(s.subspan(i, 1));
    return v;
  };
  return fast_impl(f, ge, frame, y_grid, meta);
}

cd field_inner_product(const DstftField& F, const DstftField& G) {
  if (!F.y_grid.same_as(G.y_grid) || !F.xi_grid.same_as(G.xi_grid))
    throw InputError("field_inner_product: grid mismatch");
  cd acc = 0.0;
  for (std::size_t i = 0; i < F.values.size(); ++i) acc += F.values[i] * std::conj(G.values[i]);
  return acc * F.y_grid.cell_volume() * F.xi_grid.cell_volume();
}

}  // namespace dstft
