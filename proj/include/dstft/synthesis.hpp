#pragma once

// Synthesis operator
//   DS* F(t) = int int F(y, xi) g(u.t - y) exp(2 pi i xi.t) dxi dy
// and the identities built on it.

#include "dstft/transform.hpp"

namespace dstft {

/// Raised when a window pair cannot be used for reconstruction.
class PairingError : public InputError {
 public:
  PairingError(const std::string& what, PairingCert cert)
      : InputError(what), cert_(cert) {}
  const PairingCert& cert() const { return cert_; }

 private:
  PairingCert cert_;
};

/// Fast path: one inverse dft per y, then the y-sum. out_grid must be the
/// grid whose dual lattice is F.xi_grid.
Signal dso_fast(const DstftField& F, const Window& g, const DirectionFrame& frame,
                const Grid& out_grid);

/// Direct triple sum; rejects output grids with more samples than `cap`.
Signal dso_direct(const DstftField& F, const Window& g, const DirectionFrame& frame,
                  const Grid& out_grid, std::size_t cap = kDefaultOracleCap);

/// dso_fast(dstft_fast(f, g), phi) / (phi, g). Throws PairingError when the pair
/// is not admissible. y_grid defaults to the first k axes of f's grid.
Signal reconstruct(const Signal& f, const Window& g, const Window& phi,
                   const DirectionFrame& frame);
Signal reconstruct(const Signal& f, const Window& g, const Window& phi,
                   const DirectionFrame& frame, const Grid& y_grid);

/// Ratio of the achieved synthesis scaling vol(y) sum_y conj(g) phi (u.t - y)
/// to (phi, g), averaged with weight |f(t)|^2. Close to 1 when the y grid
/// samples the windows adequately.
double sampling_quality(const Signal& f, const Window& g, const Window& phi,
                        const DirectionFrame& frame, const Grid& y_grid);

struct OrthogonalityResult {
  cd lhs;
  cd rhs;
};

/// lhs = (DS_g f1, DS_phi f2) over the field grid; rhs = (h1, h2) (conj g, conj phi) / |det C|
/// with h_i the pullbacks of f_i. The two agree for every frame.
OrthogonalityResult orthogonality_check(const Signal& f1, const Signal& f2, const Window& g,
                                        const Window& phi, const DirectionFrame& frame);
OrthogonalityResult orthogonality_check(const Signal& f1, const Signal& f2, const Window& g,
                                        const Window& phi, const DirectionFrame& frame,
                                        const Grid& y_grid);

/// Converts a field computed with window g into the field for window phi:
///   DS_phi f(x, eta) = 1/(gamma, g) sum_y sum_xi F_g(y, xi)
///                      exp(-2 pi i (eta - xi).y) V(x - y, eta - xi)
/// with V = DS_phi[gamma] on the lattice difference grid. Linear (zero-padded)
/// in y, circular in xi. Requires the standard frame and a y grid on the
/// signal lattice of the first k axes.
DstftField window_change(const DstftField& F_g, const Window& g, const Window& gamma,
                         const Window& phi, const DirectionFrame& frame);

}  // namespace dstft
