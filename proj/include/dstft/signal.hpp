#pragma once

// Sampled signals on uniform grids and the continuous-convention Fourier
// transform  f^(xi) = int f(x) exp(-2 pi i xi.x) dx  approximated by a
// Riemann sum on the grid.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dstft/grid.hpp"

namespace dstft {

inline constexpr std::size_t kDefaultOracleCap = std::size_t{1} << 16;

struct Signal {
  Grid grid;
  std::vector<cd> values;

  Signal() = default;
  Signal(Grid g, std::vector<cd> v);
  /// Zero signal on a grid.
  explicit Signal(Grid g);

  /// Throws InputError when the value count does not match the grid or a
  /// value is not finite.
  void validate() const;
};

/// Spectrum on the DFT-dual lattice; storage is in centred ("fftshifted")
/// order, i.e. storage index m on an axis is frequency (m - floor(N/2)) * dxi.
struct Spectrum {
  Grid freq_grid;
  std::vector<cd> values;
};

enum class Interpolation { Trigonometric, Linear };

/// f^(xi_m) = cell_volume * sum_i f(t_i) exp(-2 pi i xi_m . t_i), computed with a
/// fast transform; the origin phase is applied exactly.
Spectrum dft(const Signal& f);

/// Inverse of dft. `time_grid` must be a grid whose dual is `F.freq_grid`.
Signal idft(const Spectrum& F, const Grid& time_grid);

/// Same quadrature sum as dft by direct summation. Rejects signals with more
/// samples than `cap`.
Spectrum dft_oracle(const Signal& f, std::size_t cap = kDefaultOracleCap);

/// (f, g) = cell_volume * sum f conj(g).
cd inner_product(const Signal& f, const Signal& g);
cd inner_product_spectrum(const Spectrum& F, const Spectrum& G);
double l2_norm(const Signal& f);

/// Fraction of sum |f| carried by the outermost lattice layer.
double boundary_mass_fraction(const Signal& f);
inline constexpr double kBoundaryMassThreshold = 1e-9;

/// Evaluates a sampled signal at arbitrary points.
///
/// Trigonometric mode evaluates the periodic band-limited interpolant (exact at
/// lattice points, Nyquist terms split symmetrically); Linear mode is
/// multilinear. Points outside the sampled box evaluate to 0; the periodic
/// interpolant is still reported through `value_periodic` so callers can
/// measure how much mass they dropped.
class Interpolator {
 public:
  Interpolator(const Signal& f, Interpolation kind);

  /// Value at x, 0 outside the sampled box.
  cd operator()(std::span<const double> x) const;
  bool inside(std::span<const double> x) const;
  /// Interpolant ignoring the box (periodic continuation for Trigonometric,
  /// clamped-to-zero for Linear).
  cd value_periodic(std::span<const double> x) const;

  const Grid& grid() const { return grid_; }
  Interpolation kind() const { return kind_; }

 private:
  cd trig(std::span<const double> x) const;
  cd linear(std::span<const double> x) const;

  Grid grid_;
  Interpolation kind_;
  std::vector<cd> samples_;
  std::vector<cd> coeffs_;  // dft values times dual cell volume
  Grid freq_;
};

namespace testing_hooks {
/// Multiplies every dft output by `factor`. Used by the self-test to check that
/// a corrupted scaling is detected; 1.0 restores normal behaviour.
void set_dft_scale_fault(double factor);
}  // namespace testing_hooks

}  // namespace dstft
