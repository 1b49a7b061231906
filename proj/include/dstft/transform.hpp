#pragma once

// Forward k-directional STFT
//   DS f(y, xi) = int f(t) conj(g(u.t - y)) exp(-2 pi i t.xi) dt
// on a product grid y_grid x xi_grid.

#include <string>
#include <vector>

#include "dstft/direction.hpp"
#include "dstft/signal.hpp"
#include "dstft/windows.hpp"

namespace dstft {

struct DstftField {
  Grid y_grid;   // dim k
  Grid xi_grid;  // dim n, dual lattice of the source grid
  std::vector<cd> values;  // index (y, xi), y-major
  DirectionFrame frame;
  std::string window_meta;
  std::vector<double> source_origin;  // origin of the signal grid

  std::span<cd> slice(std::size_t y) {
    return {values.data() + y * xi_grid.size(), xi_grid.size()};
  }
  std::span<const cd> slice(std::size_t y) const {
    return {values.data() + y * xi_grid.size(), xi_grid.size()};
  }
  /// Grid of the signal this field was computed from.
  Grid source_grid() const;
};

/// First k axes of the signal grid.
Grid default_y_grid(const Grid& signal_grid, std::size_t k);

/// Direct quadrature; rejects signals with more samples than `cap`.
DstftField dstft_direct(const Signal& f, const Window& g, const DirectionFrame& frame,
                        const Grid& y_grid, std::size_t cap = kDefaultOracleCap);

/// Direct quadrature at a single (y, xi) with arbitrary xi.
cd dstft_direct_at(const Signal& f, const Window& g, const DirectionFrame& frame,
                   std::span<const double> y, std::span<const double> xi);

/// One dft of t -> f(t) conj(g(u.t - y)) per y.
DstftField dstft_fast(const Signal& f, const Window& g, const DirectionFrame& frame,
                      const Grid& y_grid);

/// dstft_fast with the product window g_1(s_1) ... g_k(s_k). Each factor must
/// be one-dimensional with the spacing of the matching y_grid axis.
DstftField partial_stft(const Signal& f, const std::vector<Window>& g_list,
                        const DirectionFrame& frame, const Grid& y_grid);

/// vol(y) vol(xi) sum F conj(G).
cd field_inner_product(const DstftField& F, const DstftField& G);

}  // namespace dstft
