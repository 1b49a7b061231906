#pragma once

// Direction frames u^k and the linear change of variables t = C s that turns
// the frame directions into the first k coordinate axes.

#include <string>
#include <vector>

#include "dstft/signal.hpp"

namespace dstft {

using Matrix = std::vector<std::vector<double>>;  // row-major, rows of equal length

struct DirectionFrame {
  std::size_t n = 0;
  std::size_t k = 0;
  Matrix u;  // k x n, unit rows
  Matrix B;  // rows u_1..u_k, e_{k+1}..e_n
  Matrix C;  // inverse of B
  double detC = 1.0;

  /// True when u is the first k standard basis vectors.
  bool is_standard(double tol = 1e-14) const;

  /// (u_1.t, ..., u_k.t)
  void project(std::span<const double> t, std::span<double> out) const;
};

inline constexpr double kSingularDetThreshold = 1e-10;

/// Normalises the rows and assembles B and C. Rejects zero rows and frames
/// whose B is singular (|det B| < 1e-10).
DirectionFrame build_frame(const Matrix& u_rows);

/// Frame e_1..e_k in R^n.
DirectionFrame identity_frame(std::size_t n, std::size_t k);

/// eta = C^T xi.
std::vector<double> frequency_map(std::span<const double> xi, const DirectionFrame& frame);

struct PullbackReport {
  double exterior_mass_fraction = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr double kExteriorMassWarn = 0.01;

/// h(s) = |det C| f(C s) sampled on out_grid.
Signal pullback(const Signal& f, const DirectionFrame& frame, const Grid& out_grid,
                Interpolation interp = Interpolation::Trigonometric,
                PullbackReport* report = nullptr);

}  // namespace dstft
