#include "dstft/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dstft/parallel.hpp"
#include "fft.hpp"

namespace dstft {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_field(const DstftField& F, const Window& g, const DirectionFrame& frame,
                 const Grid& out_grid) {
  if (F.values.size() != F.y_grid.size() * F.xi_grid.size())
    throw InputError("dso: field value count does not match its grids");
  if (frame.n != F.xi_grid.dim() || frame.k != F.y_grid.dim())
    throw InputError("dso: frame (n=" + std::to_string(frame.n) + ", k=" +
                     std::to_string(frame.k) + ") inconsistent with the field grids");
  if (g.dim() != frame.k) throw InputError("dso: window dimension does not match k");
  if (out_grid.dim() != frame.n) throw InputError("dso: output grid dimension does not match n");
  for (const cd& v : F.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InputError("dso: field contains non-finite values");
}

std::vector<cd> window_at_points(const Grid& tg, const Window& g, const DirectionFrame& frame,
                                 std::span<const double> y) {
  std::vector<cd> row(tg.size());
  std::vector<double> t(tg.dim()), s(frame.k);
  for (std::size_t i = 0; i < tg.size(); ++i) {
    tg.point(i, t);
    frame.project(t, s);
    for (std::size_t j = 0; j < frame.k; ++j) s[j] -= y[j];
    row[i] = g.at(s);
  }
  return row;
}

cd synthesis_pairing(const Window& g, const Window& phi) {
  PairingCert cert = pairing_check(g, phi);
  if (!cert.admissible) {
    std::ostringstream os;
    os << "synthesis window not admissible: |(g, phi)| = " << cert.magnitude
       << " below threshold " << cert.threshold;
    throw PairingError(os.str(), cert);
  }
  // (phi, g) = conj((g, phi))
  return std::conj(cert.value);
}

}  // namespace

Signal dso_fast(const DstftField& F, const Window& g, const DirectionFrame& frame,
                const Grid& out_grid) {
  check_field(F, g, frame, out_grid);
  if (!out_grid.dual().same_as(F.xi_grid))
    throw InputError("dso_fast: output grid " + out_grid.describe() +
                     " is not dual to the field frequency grid " + F.xi_grid.describe());
  std::size_t ny = F.y_grid.size(), nt = out_grid.size();
  std::vector<cd> parts(ny * nt);
  parallel_for(0, ny, [&](std::size_t yi) {
    std::vector<double> y = F.y_grid.point(yi);
    Spectrum S{F.xi_grid, {F.slice(yi).begin(), F.slice(yi).end()}};
    Signal s = idft(S, out_grid);
    std::vector<cd> w = window_at_points(out_grid, g, frame, y);
    for (std::size_t i = 0; i < nt; ++i) parts[yi * nt + i] = s.values[i] * w[i];
  });
  Signal out(out_grid);
  double vy = F.y_grid.cell_volume();
  parallel_for(0, nt, [&](std::size_t i) {
    cd acc = 0.0;
    for (std::size_t yi = 0; yi < ny; ++yi) acc += parts[yi * nt + i];
    out.values[i] = acc * vy;
  });
  return out;
}

Signal dso_direct(const DstftField& F, const Window& g, const DirectionFrame& frame,
                  const Grid& out_grid, std::size_t cap) {
  check_field(F, g, frame, out_grid);
  if (out_grid.size() > cap)
    throw InputError("dso_direct: " + std::to_string(out_grid.size()) +
                     " output samples exceed the oracle cap " + std::to_string(cap));
  const Grid& xg = F.xi_grid;
  std::size_t n = frame.n;
  Signal out(out_grid);
  double w = F.y_grid.cell_volume() * xg.cell_volume();
  parallel_for(0, out_grid.size(), [&](std::size_t ti) {
    std::vector<double> t = out_grid.point(ti), s(frame.k), y(frame.k), xi(n);
    frame.project(t, s);
    cd acc = 0.0;
    for (std::size_t yi = 0; yi < F.y_grid.size(); ++yi) {
      F.y_grid.point(yi, y);
      for (std::size_t j = 0; j < frame.k; ++j) y[j] = s[j] - y[j];
      cd gv = g.at(y);
      if (gv == cd{}) continue;
      auto row = F.slice(yi);
      cd inner = 0.0;
      for (std::size_t m = 0; m < xg.size(); ++m) {
        xg.point(m, xi);
        double ph = 0.0;
        for (std::size_t a = 0; a < n; ++a) ph += xi[a] * t[a];
        inner += row[m] * std::polar(1.0, kTwoPi * ph);
      }
      acc += gv * inner;
    }
    out.values[ti] = acc * w;
  });
  return out;
}

Signal reconstruct(const Signal& f, const Window& g, const Window& phi,
                   const DirectionFrame& frame) {
  return reconstruct(f, g, phi, frame, default_y_grid(f.grid, frame.k));
}

Signal reconstruct(const Signal& f, const Window& g, const Window& phi,
                   const DirectionFrame& frame, const Grid& y_grid) {
  cd pair = synthesis_pairing(g, phi);
  DstftField F = dstft_fast(f, g, frame, y_grid);
  Signal out = dso_fast(F, phi, frame, f.grid);
  for (auto& v : out.values) v /= pair;
  return out;
}

double sampling_quality(const Signal& f, const Window& g, const Window& phi,
                        const DirectionFrame& frame, const Grid& y_grid) {
  cd pair = std::conj(pairing_check(g, phi).value);
  if (pair == cd{}) return 0.0;
  std::vector<double> t(frame.n), s(frame.k), d(frame.k);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    double wgt = std::norm(f.values[i]);
    if (wgt == 0.0) continue;
    f.grid.point(i, t);
    frame.project(t, s);
    cd S = 0.0;
    for (std::size_t yi = 0; yi < y_grid.size(); ++yi) {
      y_grid.point(yi, d);
      for (std::size_t j = 0; j < frame.k; ++j) d[j] = s[j] - d[j];
      S += std::conj(g.at(d)) * phi.at(d);
    }
    S *= y_grid.cell_volume();
    num += wgt * std::abs(S / pair);
    den += wgt;
  }
  return den > 0.0 ? num / den : 1.0;
}

OrthogonalityResult orthogonality_check(const Signal& f1, const Signal& f2, const Window& g,
                                        const Window& phi, const DirectionFrame& frame) {
  return orthogonality_check(f1, f2, g, phi, frame, default_y_grid(f1.grid, frame.k));
}

OrthogonalityResult orthogonality_check(const Signal& f1, const Signal& f2, const Window& g,
                                        const Window& phi, const DirectionFrame& frame,
                                        const Grid& y_grid) {
  if (!f1.grid.same_as(f2.grid)) throw InputError("orthogonality_check: signal grids differ");
  if (!g.grid.same_as(phi.grid)) throw InputError("orthogonality_check: window grids differ");
  DstftField F1 = dstft_fast(f1, g, frame, y_grid);
  DstftField F2 = dstft_fast(f2, phi, frame, y_grid);
  OrthogonalityResult r;
  r.lhs = field_inner_product(F1, F2);
  Signal h1 = pullback(f1, frame, f1.grid);
  Signal h2 = pullback(f2, frame, f2.grid);
  Signal cg = window_signal(g), cp = window_signal(phi);
  for (auto& v : cg.values) v = std::conj(v);
  for (auto& v : cp.values) v = std::conj(v);
  r.rhs = inner_product(h1, h2) * inner_product(cg, cp) / std::abs(frame.detC);
  return r;
}

DstftField window_change(const DstftField& F_g, const Window& g, const Window& gamma,
                         const Window& phi, const DirectionFrame& frame) {
  if (!frame.is_standard() || !F_g.frame.is_standard())
    throw InputError("window_change: only the standard frame e_1..e_k is supported");
  std::size_t k = frame.k, n = frame.n;
  if (F_g.y_grid.dim() != k || F_g.xi_grid.dim() != n)
    throw InputError("window_change: field grids do not match the frame");
  if (g.dim() != k || gamma.dim() != k || phi.dim() != k)
    throw InputError("window_change: window dimensions must equal k");
  if (F_g.values.size() != F_g.y_grid.size() * F_g.xi_grid.size())
    throw InputError("window_change: field value count does not match its grids");

  Grid src = F_g.source_grid();
  const Grid& yg = F_g.y_grid;
  for (std::size_t a = 0; a < k; ++a) {
    double h = src.spacing()[a];
    if (std::abs(yg.spacing()[a] - h) > 1e-9 * h)
      throw InputError("window_change: y spacing must equal the signal spacing on axis " +
                       std::to_string(a));
    double off = (yg.origin()[a] - src.origin()[a]) / h;
    if (std::abs(off - std::round(off)) > 1e-6)
      throw InputError("window_change: y grid is not on the signal lattice on axis " +
                       std::to_string(a));
  }

  PairingCert cert = pairing_check(g, gamma);
  if (!cert.admissible) {
    std::ostringstream os;
    os << "window_change: gamma is not admissible for g: |(g, gamma)| = " << cert.magnitude;
    throw PairingError(os.str(), cert);
  }
  cd norm = 1.0 / std::conj(cert.value);  // 1 / (gamma, g)

  const Grid& xg = F_g.xi_grid;
  std::vector<std::size_t> Nk(xg.counts().begin(), xg.counts().begin() + static_cast<std::ptrdiff_t>(k));
  std::size_t K = 1;
  for (auto c : Nk) K *= c;
  std::size_t H = xg.size() / K;
  std::vector<std::size_t> Yc = yg.counts();
  std::size_t NY = yg.size();

  // Difference grid of y offsets d = (e - (NY-1)) h.
  std::vector<std::size_t> Dc(k);
  std::size_t ND = 1;
  for (std::size_t a = 0; a < k; ++a) {
    Dc[a] = 2 * Yc[a] - 1;
    ND *= Dc[a];
  }
  double volk = 1.0;
  for (std::size_t a = 0; a < k; ++a) volk *= yg.spacing()[a];

  // Lattice points m h covering gamma's grid.
  std::vector<long long> mlo(k), mhi(k);
  std::size_t NM = 1;
  for (std::size_t a = 0; a < k; ++a) {
    double h = yg.spacing()[a];
    mlo[a] = static_cast<long long>(std::ceil(gamma.grid.origin()[a] / h - 1e-9));
    mhi[a] = static_cast<long long>(std::floor(gamma.grid.upper(a) / h + 1e-9));
    NM *= static_cast<std::size_t>(mhi[a] - mlo[a] + 1);
  }
  std::vector<cd> gam(NM);
  {
    std::vector<double> p(k);
    for (std::size_t mi = 0; mi < NM; ++mi) {
      std::size_t r = mi;
      for (std::size_t a = k; a-- > 0;) {
        std::size_t span = static_cast<std::size_t>(mhi[a] - mlo[a] + 1);
        p[a] = static_cast<double>(mlo[a] + static_cast<long long>(r % span)) * yg.spacing()[a];
        r /= span;
      }
      gam[mi] = gamma.at(p);
    }
  }

  // Vhat_d[r] = volk * K * fold_d[-r mod N], fold_d[m mod N] = sum gamma(mh) conj(phi(mh - d)).
  std::vector<cd> Vhat(ND * K);
  parallel_for(0, ND, [&](std::size_t di) {
    std::vector<double> d(k), p(k);
    std::size_t r = di;
    for (std::size_t a = k; a-- > 0;) {
      d[a] = (static_cast<double>(r % Dc[a]) - static_cast<double>(Yc[a] - 1)) * yg.spacing()[a];
      r /= Dc[a];
    }
    std::vector<cd> fold(K, cd{});
    std::vector<std::size_t> fi(k);
    for (std::size_t mi = 0; mi < NM; ++mi) {
      if (gam[mi] == cd{}) continue;
      std::size_t rr = mi;
      for (std::size_t a = k; a-- > 0;) {
        std::size_t span = static_cast<std::size_t>(mhi[a] - mlo[a] + 1);
        long long m = mlo[a] + static_cast<long long>(rr % span);
        rr /= span;
        p[a] = static_cast<double>(m) * yg.spacing()[a] - d[a];
        auto N = static_cast<long long>(Nk[a]);
        fi[a] = static_cast<std::size_t>(((m % N) + N) % N);
      }
      std::size_t flat = 0;
      for (std::size_t a = 0; a < k; ++a) flat = flat * Nk[a] + fi[a];
      fold[flat] += gam[mi] * std::conj(phi.at(p));
    }
    cd* out = Vhat.data() + di * K;
    for (std::size_t q = 0; q < K; ++q) {
      std::size_t rr = q, neg = 0, mul = 1;
      std::vector<std::size_t> qi(k);
      for (std::size_t a = k; a-- > 0;) {
        qi[a] = rr % Nk[a];
        rr /= Nk[a];
      }
      for (std::size_t a = k; a-- > 0;) {
        neg += ((Nk[a] - qi[a]) % Nk[a]) * mul;
        mul *= Nk[a];
      }
      out[q] = volk * static_cast<double>(K) * fold[neg];
    }
  });

  // y lattice offsets j (relative to the first y point) and their phases.
  std::vector<std::vector<std::size_t>> yidx(NY, std::vector<std::size_t>(k));
  for (std::size_t yi = 0; yi < NY; ++yi) yg.unravel(yi, yidx[yi]);
  // exp(2 pi i xi.y) factors per axis: xi_m y_j
  std::vector<std::vector<cd>> ph_y(k);
  for (std::size_t a = 0; a < k; ++a) {
    ph_y[a].resize(Nk[a] * Yc[a]);
    for (std::size_t m = 0; m < Nk[a]; ++m)
      for (std::size_t j = 0; j < Yc[a]; ++j)
        ph_y[a][m * Yc[a] + j] = std::polar(1.0, kTwoPi * xg.coord(a, m) * yg.coord(a, j));
  }

  DstftField out = F_g;
  out.window_meta = phi.describe();
  out.values.assign(F_g.values.size(), cd{});
  double scale_common = yg.cell_volume();
  for (std::size_t a = 0; a < k; ++a) scale_common *= xg.spacing()[a];
  cd scale = norm * scale_common / static_cast<double>(K);

  // exp(-2 pi i eta_p.y) = exp(-2 pi i eta_p.y_0) exp(-2 pi i (p - c) j / N): the second
  // factor is a circular shift by j in the transformed domain times exp(2 pi i c j / N).
  std::vector<cd> cshift(NY);
  for (std::size_t yi = 0; yi < NY; ++yi) {
    cd v = 1.0;
    for (std::size_t a = 0; a < k; ++a) {
      auto N = static_cast<long long>(Nk[a]);
      v *= detail::unit_root((N / 2) * static_cast<long long>(yidx[yi][a]), N);
    }
    cshift[yi] = v;
  }
  std::vector<cd> eta_y0(K);
  for (std::size_t p = 0; p < K; ++p) {
    std::size_t rr = p;
    double ph = 0.0;
    for (std::size_t a = k; a-- > 0;) {
      ph += xg.coord(a, rr % Nk[a]) * yg.origin()[a];
      rr /= Nk[a];
    }
    eta_y0[p] = std::polar(1.0, -kTwoPi * ph);
  }
  // shifted index table: (r + j) mod N, flattened
  auto shift_index = [&](std::size_t r, const std::vector<std::size_t>& j) {
    std::size_t flat = 0, rr = r;
    std::vector<std::size_t> ri(k);
    for (std::size_t a = k; a-- > 0;) {
      ri[a] = rr % Nk[a];
      rr /= Nk[a];
    }
    for (std::size_t a = 0; a < k; ++a) flat = flat * Nk[a] + (ri[a] + j[a]) % Nk[a];
    return flat;
  };
  std::vector<std::vector<std::size_t>> shift_tab(NY, std::vector<std::size_t>(K));
  for (std::size_t yi = 0; yi < NY; ++yi)
    for (std::size_t r = 0; r < K; ++r) shift_tab[yi][r] = shift_index(r, yidx[yi]);

  parallel_for(0, H, [&](std::size_t hj) {
    // Ahat_y = FFT over xi~ of F(y, xi~, hj) exp(2 pi i xi~.y)
    std::vector<cd> Ahat(NY * K);
    for (std::size_t yi = 0; yi < NY; ++yi) {
      cd* A = Ahat.data() + yi * K;
      auto row = F_g.slice(yi);
      for (std::size_t m = 0; m < K; ++m) {
        std::size_t rr = m;
        cd ph = 1.0;
        for (std::size_t a = k; a-- > 0;) {
          ph *= ph_y[a][(rr % Nk[a]) * Yc[a] + yidx[yi][a]];
          rr /= Nk[a];
        }
        A[m] = row[m * H + hj] * ph;
      }
      detail::fft_inplace({A, K}, Nk, -1);
    }
    std::vector<cd> acc(K);
    for (std::size_t xi = 0; xi < NY; ++xi) {
      std::fill(acc.begin(), acc.end(), cd{});
      for (std::size_t yi = 0; yi < NY; ++yi) {
        std::size_t di = 0;
        for (std::size_t a = 0; a < k; ++a)
          di = di * Dc[a] + (yidx[xi][a] + Yc[a] - 1 - yidx[yi][a]);
        const cd* V = Vhat.data() + di * K;
        const cd* A = Ahat.data() + yi * K;
        const auto& st = shift_tab[yi];
        cd c = cshift[yi];
        for (std::size_t r = 0; r < K; ++r) {
          std::size_t s = st[r];
          acc[r] += A[s] * V[s] * c;
        }
      }
      detail::fft_inplace(acc, Nk, +1);
      auto orow = out.slice(xi);
      for (std::size_t p = 0; p < K; ++p) orow[p * H + hj] = acc[p] * eta_y0[p] * scale;
    }
  });
  return out;
}

}  // namespace dstft
