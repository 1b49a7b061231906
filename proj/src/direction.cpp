#include "dstft/direction.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "dstft/parallel.hpp"

namespace dstft {
namespace {

// Index of the first row that is (numerically) in the span of the earlier
// rows, or -1.
int first_dependent_row(const Eigen::MatrixXd& rows, double tol) {
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::VectorXd v = rows.row(i).transpose();
    double norm0 = v.norm();
    for (const auto& b : basis) v -= b.dot(v) * b;
    if (norm0 == 0.0 || v.norm() < tol * std::max(1.0, norm0)) return static_cast<int>(i);
    basis.push_back(v / v.norm());
  }
  return -1;
}

}  // namespace

bool DirectionFrame::is_standard(double tol) const {
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(u[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
  return true;
}

void DirectionFrame::project(std::span<const double> t, std::span<double> out) const {
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += u[i][j] * t[j];
    out[i] = s;
  }
}

DirectionFrame build_frame(const Matrix& u_rows) {
  if (u_rows.empty()) throw InputError("frame: at least one direction is required");
  std::size_t n = u_rows[0].size();
  std::size_t k = u_rows.size();
  if (n == 0) throw InputError("frame: directions must be nonempty vectors");
  if (k > n)
    throw InputError("frame: " + std::to_string(k) + " directions in R^" + std::to_string(n));
  DirectionFrame fr;
  fr.n = n;
  fr.k = k;
  fr.u.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (u_rows[i].size() != n)
      throw InputError("frame: row " + std::to_string(i) + " has length " +
                       std::to_string(u_rows[i].size()) + ", expected " + std::to_string(n));
    double norm = 0.0;
    for (double x : u_rows[i]) {
      if (!std::isfinite(x)) throw InputError("frame: row " + std::to_string(i) + " is not finite");
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) throw InputError("frame: row " + std::to_string(i) + " is zero");
    fr.u[i].resize(n);
    for (std::size_t j = 0; j < n; ++j) fr.u[i][j] = u_rows[i][j] / norm;
  }

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fr.u[i][j];
  double detB = B.determinant();
  if (!(std::abs(detB) >= kSingularDetThreshold)) {
    Eigen::MatrixXd U = B.topRows(static_cast<Eigen::Index>(k));
    int dep = first_dependent_row(U, 1e-8);
    std::ostringstream msg;
    if (dep >= 0) {
      msg << "frame: dependent directions (row " << dep << " lies in the span of the earlier rows)";
    } else {
      int bad = first_dependent_row(U.leftCols(static_cast<Eigen::Index>(k)), 1e-8);
      msg << "frame: dependent directions after completing with e_" << k + 1 << "..e_" << n
          << " (|det B| = " << std::abs(detB) << "); row " << std::max(bad, 0)
          << " is degenerate against the trailing coordinate axes, and the frame matrix keeps "
             "the last n-k identity rows";
    }
    throw InputError(msg.str());
  }
  Eigen::MatrixXd C = B.inverse();
  fr.B.assign(n, std::vector<double>(n));
  fr.C.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      fr.B[i][j] = B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      fr.C[i][j] = C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  fr.detC = 1.0 / detB;
  return fr;
}

DirectionFrame identity_frame(std::size_t n, std::size_t k) {
  Matrix u(k, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < k; ++i) u[i][i] = 1.0;
  return build_frame(u);
}

std::vector<double> frequency_map(std::span<const double> xi, const DirectionFrame& frame) {
  std::vector<double> eta(frame.n, 0.0);
  for (std::size_t i = 0; i < frame.n; ++i)
    for (std::size_t j = 0; j < frame.n; ++j) eta[i] += frame.C[j][i] * xi[j];
  return eta;
}

Signal pullback(const Signal& f, const DirectionFrame& frame, const Grid& out_grid,
                Interpolation interp, PullbackReport* report) {
  f.validate();
  if (out_grid.dim() != frame.n || f.grid.dim() != frame.n)
    throw InputError("pullback: grid dimension does not match the frame dimension " +
                     std::to_string(frame.n));
  Signal h(out_grid);
  double detC = std::abs(frame.detC);
  if (frame.is_standard()) {
    // C = I: plain resampling.
    if (out_grid.same_as(f.grid)) {
      h.values = f.values;
      if (report) *report = {};
      return h;
    }
  }
  Interpolator ip(f, interp);
  std::vector<double> exterior(out_grid.size(), 0.0), all(out_grid.size(), 0.0);
  std::size_t n = frame.n;
  parallel_for(0, out_grid.size(), [&](std::size_t i) {
    std::vector<double> s(n), t(n, 0.0);
    out_grid.point(i, s);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) t[r] += frame.C[r][c] * s[c];
    cd v = ip.value_periodic(t);
    all[i] = std::abs(v);
    if (ip.inside(t)) {
      h.values[i] = detC * v;
    } else {
      exterior[i] = all[i];
    }
  });
  double tot = 0.0, ext = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    tot += all[i];
    ext += exterior[i];
  }
  if (report) {
    report->exterior_mass_fraction = tot > 0.0 ? ext / tot : 0.0;
    report->warnings.clear();
    if (report->exterior_mass_fraction > kExteriorMassWarn) {
      std::ostringstream os;
      os << "pullback: " << 100.0 * report->exterior_mass_fraction
         << "% of the mass-weighted samples map outside the source grid";
      report->warnings.push_back(os.str());
    }
  }
  return h;
}

}  // namespace dstft
