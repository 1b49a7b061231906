#pragma once

// Directional microlocal regularity tests. A point (y0, xi0) is regular when
//   sup_{y in L_r(y0)} |DS f(y, xi)| <= C exp(-N |xi|^(1/alpha))
// over a cone around xi0; the rate N is estimated by regression of dyadic
// shell maxima.

#include <string>
#include <vector>

#include "dstft/transform.hpp"

namespace dstft {

struct ConeSpec {
  std::vector<double> center;  // unit vector
  double half_angle = 0.0;     // radians, in (0, pi/2)
  double r_min = 0.0;

  bool contains(std::span<const double> xi) const;
};

/// Validates and normalises the center direction.
ConeSpec make_cone(std::vector<double> center, double half_angle, double r_min);

struct BallSpec {
  std::vector<double> center;
  double radius = 0.0;

  bool contains(std::span<const double> y) const;
};

struct DecayFit {
  double N_hat = 0.0;
  double logC_hat = 0.0;
  double residual = 0.0;
  std::size_t n_points = 0;  // cone lattice points used
  std::size_t n_shells = 0;  // shells entering the regression
  double alpha = 0.0;
  bool saturated = false;    // decay reached the noise floor before three shells
  double curvature = 0.0;    // quadratic coefficient of the log-shell curve
};

struct FitOptions {
  double noise_rel = 1e-12;        // shells below noise_rel * max|F| are dropped
  double nyquist_fraction = 0.5;   // only |xi_a| <= fraction * Nyquist_a is used
  double residual_cap = 0.5;       // log units
  int shells_per_octave = 1;
};

inline constexpr std::size_t kMinConePoints = 8;
inline constexpr double kLogFloor = 1e-300;

/// Fit over the y points of F inside `ball` and the xi points inside `cone`.
DecayFit decay_fit(const DstftField& F, const BallSpec& ball, const ConeSpec& cone, double alpha,
                   const FitOptions& opt = {});

/// Same fit on a plain spectrum (single slice).
DecayFit decay_fit(const Spectrum& S, const ConeSpec& cone, double alpha,
                   const FitOptions& opt = {});

bool is_regular(const DecayFit& fit, double threshold_N, const FitOptions& opt = {});

bool regular_point_test(const DstftField& F, const BallSpec& ball, const ConeSpec& cone,
                        double alpha, double threshold_N, const FitOptions& opt = {});

/// Cut-off form: decay of the Fourier transform of chi(t_1..t_k) f(t) over the
/// cone. chi lives on R^k and is extended constantly in the remaining axes.
bool partial_wf_test(const Signal& f, const Window& chi, std::span<const double> y0,
                     const ConeSpec& cone, double alpha, double threshold_N,
                     const FitOptions& opt = {}, DecayFit* fit_out = nullptr);

struct WavefrontEntry {
  BallSpec cell;
  ConeSpec cone;
  DecayFit fit;
  bool regular = false;
};

struct WavefrontReport {
  std::vector<WavefrontEntry> entries;
  double threshold_N = 1.0;
  double residual_cap = 0.5;
  double alpha = 0.0;
  std::string window_meta;
  std::vector<std::string> warnings;
};

struct ScanOptions {
  FitOptions fit;
  bool strict_window = true;
};

/// Computes one field with dstft_fast on the signal's own y lattice and tests
/// every (cell, cone) pair.
WavefrontReport wavefront_scan(const Signal& f, const Window& g, const DirectionFrame& frame,
                               double alpha, const std::vector<BallSpec>& y_cells,
                               const std::vector<ConeSpec>& cones, double threshold_N,
                               const ScanOptions& opt = {});

/// Same, on a precomputed field.
WavefrontReport wavefront_scan(const DstftField& F, double alpha,
                               const std::vector<BallSpec>& y_cells,
                               const std::vector<ConeSpec>& cones, double threshold_N,
                               const FitOptions& opt = {});

/// True iff every entry is regular. Throws InputError naming an uncovered
/// direction when the report's cones do not cover the unit sphere.
bool global_regularity_check(const WavefrontReport& report);

/// `count` cones in the plane with centers at angles 2 pi j / count.
std::vector<ConeSpec> cone_dictionary_2d(std::size_t count, double half_angle, double r_min);

/// Default inner cone radius: four frequency lattice spacings.
double default_r_min(const Grid& xi_grid);

std::string report_to_json(const WavefrontReport& report);
std::string report_to_csv(const WavefrontReport& report);

}  // namespace dstft
