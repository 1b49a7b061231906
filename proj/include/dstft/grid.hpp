#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dstft {

using cd = std::complex<double>;

/// Raised when an input violates an operation's precondition. The CLI maps it
/// to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform sampling lattice in R^d: point(i) = origin + i * spacing.
///
/// Storage order everywhere in the library is row-major over the multi-index,
/// axis 0 slowest.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<double> origin, std::vector<double> spacing,
       std::vector<std::size_t> counts);

  /// Lattice with origin -floor(N/2)*h on each axis, so that 0 is a lattice point.
  static Grid centered(std::vector<std::size_t> counts, std::vector<double> spacing);

  std::size_t dim() const { return counts_.size(); }
  std::size_t size() const { return size_; }
  double cell_volume() const;

  const std::vector<double>& origin() const { return origin_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  double coord(std::size_t axis, std::size_t i) const {
    return origin_[axis] + static_cast<double>(i) * spacing_[axis];
  }
  /// Last lattice coordinate along an axis.
  double upper(std::size_t axis) const { return coord(axis, counts_[axis] - 1); }

  void unravel(std::size_t flat, std::span<std::size_t> index) const;
  std::size_t ravel(std::span<const std::size_t> index) const;
  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;

  /// DFT-dual lattice centred at zero: spacing 1/(N h), origin -floor(N/2)/(N h).
  Grid dual() const;

  /// First k axes.
  Grid project(std::size_t k) const;

  /// Equal shape and equal origin/spacing up to a relative tolerance.
  bool same_as(const Grid& other, double rel_tol = 1e-12) const;

  std::string describe() const;

 private:
  std::vector<double> origin_;
  std::vector<double> spacing_;
  std::vector<std::size_t> counts_;
  std::size_t size_ = 0;
};

}  // namespace dstft
