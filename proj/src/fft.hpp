#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dstft/grid.hpp"

namespace dstft::detail {

/// Unnormalised in-place multidimensional FFT over row-major data.
/// sign = -1: sum x_n exp(-2 pi i k.n / N); sign = +1: the conjugate kernel.
void fft_inplace(std::span<cd> data, std::span<const std::size_t> dims, int sign);

/// data[i] *= prod_a factors[a][i_a] over row-major multi-indices.
void scale_separable(std::span<cd> data, std::span<const std::size_t> dims,
                     const std::vector<std::vector<cd>>& factors);

/// exp(2 pi i * num / den) with num reduced modulo den first.
cd unit_root(long long num, long long den);

}  // namespace dstft::detail
