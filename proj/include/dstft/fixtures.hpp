#pragma once

// Test signals with known analytic structure.

#include <cstdint>
#include <vector>

#include "dstft/signal.hpp"

namespace dstft::fixtures {

/// exp(-pi |t - center|^2 / width^2)
Signal gaussian(const Grid& grid, std::vector<double> center, double width);

/// H(u.t - c) with H(0) = 1.
Signal heaviside_sheet(const Grid& grid, std::vector<double> u, double c);

/// Narrow-Gaussian model of delta(u.t - c): exp(-pi (u.t - c)^2 / w^2) / w.
Signal delta_sheet(const Grid& grid, std::vector<double> u, double c, double width);

/// exp(2 pi i xi0.t)
Signal plane_wave(const Grid& grid, std::vector<double> xi0);

Signal sum(const Signal& a, const Signal& b);

/// Random complex coefficients on the dual-lattice frequencies with
/// |xi_a| <= bandwidth, synthesised with idft. Fully determined by `seed`.
Signal random_bandlimited(const Grid& grid, std::uint64_t seed, double bandwidth);

/// Multiplies by exp(2 pi i xi0.t).
Signal modulate(const Signal& f, std::span<const double> xi0);

}  // namespace dstft::fixtures
