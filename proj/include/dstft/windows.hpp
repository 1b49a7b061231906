#pragma once

// Window functions on R^k: Gaussians, compactly supported Gevrey bumps and
// sampled custom windows.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dstft/signal.hpp"

namespace dstft {

enum class WindowKind { Gaussian, GevreyBump, Custom };

struct Window {
  Grid grid;
  std::vector<cd> values;
  WindowKind kind = WindowKind::Custom;
  double alpha = 0.0;           // GevreyBump only
  double support_radius = 0.0;  // 0 = unbounded
  std::vector<double> sigma;    // Gaussian only
  std::vector<double> center;   // translation of the analytic profile

  /// Evaluates the window at an arbitrary point of R^k. Gaussian and bump
  /// windows use their closed form; custom windows return the stored sample on
  /// a lattice hit and interpolate elsewhere.
  cd at(std::span<const double> t) const;

  std::size_t dim() const { return grid.dim(); }
  std::string describe() const;

  std::shared_ptr<const Interpolator> interp;  // Custom only
};

/// g(t) = prod_j exp(-pi t_j^2 / sigma_j^2).
Window gaussian_window(const Grid& grid, std::vector<double> sigma);

/// b(t) = exp(-(1 - |t/r|^2)^(-1/(alpha-1))) for |t| < r, 0 otherwise.
Window gevrey_bump(const Grid& grid, double radius, double alpha);

/// Sampled window; off-lattice evaluation uses `interp`.
Window custom_window(Signal samples, Interpolation interp = Interpolation::Trigonometric);

/// t -> w(t - delta), resampled on the same grid.
Window shifted(const Window& w, std::span<const double> delta);

struct PairingCert {
  cd value;
  double magnitude = 0.0;
  bool admissible = false;
  double threshold = 0.0;
};

inline constexpr double kPairingRelThreshold = 1e-8;

/// value = (g, phi); admissible when |value| >= rel * |g| |phi|.
PairingCert pairing_check(const Window& g, const Window& phi,
                          double rel_threshold = kPairingRelThreshold);

/// Truncated Gelfand-Shilov seminorm estimate
///   max_{t, p, q} a^{|p|+|q|} / (p!^beta q!^alpha) |t^p d^q w(t)|
/// with per-component caps p_j <= p_max, q_j <= q_max (both at most 4) and
/// derivatives from fourth-order central differences.
double gs_seminorm_probe(const Window& w, double a, double alpha, double beta, int p_max,
                         int q_max);

Signal window_signal(const Window& w);

}  // namespace dstft
